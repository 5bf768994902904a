#ifndef FFSN_GATES_H
#define FFSN_GATES_H

/* Fused LSTM gate update for one time step.
 *
 * pre:  (batch, 4 * hidden) row-major pre-activations, gate blocks ordered
 *       [input, forget, cell-candidate, output].  Overwritten in place.
 * c, h: (batch, hidden) row-major states, updated in place.
 * y:    (batch, hidden) row-major output slot for this step (equals new h).
 */
void ffsn_lstm_gates(float *pre, float *c, float *h, float *y,
                     int batch, int hidden);

#endif
