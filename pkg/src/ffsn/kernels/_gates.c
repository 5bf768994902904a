#include <stddef.h>
#include <stdint.h>

#include "_gates.h"

/* Polynomial exp on floats, good to ~2 ulp over the clamped range.
 * Cody-Waite range reduction with a round-to-nearest magic add, then a
 * degree-5 minimax polynomial and exponent reassembly through the float
 * bit layout.  Written branch-free so the surrounding loops vectorize.
 */
static inline float fast_expf(float x) {
    const float shift = 12582912.0f; /* 1.5 * 2^23, rounds via FP add */
    x = x > 88.0f ? 88.0f : x;
    x = x < -87.0f ? -87.0f : x;
    float z = x * 1.44269504f; /* log2(e) */
    float fn = (z + shift) - shift;
    float r = x - fn * 0.693359375f;
    r -= fn * -2.12194440e-4f;
    float p = 1.9875691500e-4f;
    p = p * r + 1.3981999507e-3f;
    p = p * r + 8.3334519073e-3f;
    p = p * r + 4.1665795894e-2f;
    p = p * r + 1.6666665459e-1f;
    p = p * r + 5.0000001201e-1f;
    p = p * r * r + r + 1.0f;
    union { uint32_t bits; float value; } scale;
    scale.bits = (uint32_t)((int32_t)fn + 127) << 23;
    return p * scale.value;
}

/* The transcendental loops carry all the arithmetic, so they get runtime
 * ISA dispatch; the build itself stays at the portable baseline.
 */
__attribute__((target_clones("default", "avx2", "avx512f")))
static void vec_sigmoid(float *z, int n) {
    for (int j = 0; j < n; j++)
        z[j] = 1.0f / (1.0f + fast_expf(-z[j]));
}

__attribute__((target_clones("default", "avx2", "avx512f")))
static void vec_tanh(float *z, int n) {
    for (int j = 0; j < n; j++)
        z[j] = 1.0f - 2.0f / (fast_expf(2.0f * z[j]) + 1.0f);
}

void ffsn_lstm_gates(float *pre, float *c, float *h, float *y,
                     int batch, int hidden) {
    for (int b = 0; b < batch; b++) {
        float *row = pre + (size_t)b * 4 * hidden;
        float *cb = c + (size_t)b * hidden;
        float *hb = h + (size_t)b * hidden;
        float *yb = y + (size_t)b * hidden;
        vec_sigmoid(row, 2 * hidden);          /* input + forget gates */
        vec_tanh(row + 2 * hidden, hidden);    /* cell candidate */
        vec_sigmoid(row + 3 * hidden, hidden); /* output gate */
        /* y doubles as scratch: stage the new cell there for the tanh
         * pass, then overwrite with the gated output.
         */
        for (int j = 0; j < hidden; j++) {
            float cv = row[hidden + j] * cb[j] + row[j] * row[2 * hidden + j];
            cb[j] = cv;
            yb[j] = cv;
        }
        vec_tanh(yb, hidden);
        for (int j = 0; j < hidden; j++) {
            float hv = row[3 * hidden + j] * yb[j];
            hb[j] = hv;
            yb[j] = hv;
        }
    }
}
