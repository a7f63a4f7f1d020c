#define XOR_PARAMS_IMPL
#include "fann_shim.h"
#include "xor.h"

#ifdef FANN_HAVE_DOT
int32_t fann_dot_q(const int32_t *w, const int32_t *x, int n, int dp);
#endif

static int32_t xor_activate(int k, int32_t v)
{
    const int32_t *x, *y;
    int i;
    switch (xor_neuron_act[k]) {
    case 0: { /* linear, gain 2 * steepness */
        int32_t s = xor_neuron_steepness[k];
        return (int32_t)(uint32_t)(((int64_t)s * v) >> (XOR_DECIMAL_POINT - 1));
    }
    case 1: /* threshold */
        return v < 0 ? 0 : XOR_MULTIPLIER;
    default: /* stepwise table */
        break;
    }
    x = xor_table_x + 6 * xor_neuron_table[k];
    y = xor_table_y + 6 * xor_neuron_table[k];
    if (v < x[0])
        return y[0];
    if (v >= x[5])
        return y[5];
    for (i = 0; v >= x[i + 1]; i++)
        ;
    return y[i] + (int32_t)(((int64_t)(y[i + 1] - y[i]) * ((int64_t)v - x[i]))
                            / ((int64_t)x[i + 1] - x[i]));
}

/* weighted sum of one neuron; row holds prev weights then the bias */
static int32_t xor_neuron(const int32_t *row, const int32_t *in, int prev)
{
    int32_t acc = 0;
    int i = 0;
#ifdef FANN_HAVE_DOT
    acc = fann_dot_q(row, in, prev, XOR_DECIMAL_POINT);
    i = prev;
#endif
    for (; i + 4 <= prev; i += 4) {
        acc = (int32_t)((uint32_t)acc + (uint32_t)(((int64_t)row[i] * in[i]) >> XOR_DECIMAL_POINT));
        acc = (int32_t)((uint32_t)acc + (uint32_t)(((int64_t)row[i + 1] * in[i + 1]) >> XOR_DECIMAL_POINT));
        acc = (int32_t)((uint32_t)acc + (uint32_t)(((int64_t)row[i + 2] * in[i + 2]) >> XOR_DECIMAL_POINT));
        acc = (int32_t)((uint32_t)acc + (uint32_t)(((int64_t)row[i + 3] * in[i + 3]) >> XOR_DECIMAL_POINT));
    }
    for (; i < prev; i++)
        acc = (int32_t)((uint32_t)acc + (uint32_t)(((int64_t)row[i] * in[i]) >> XOR_DECIMAL_POINT));
    acc = (int32_t)((uint32_t)acc + (uint32_t)row[prev]);
    return acc;
}

static int32_t xor_buf[2][XOR_MAX_WIDTH];

int32_t *xor_run(const int32_t *input)
{
    const int32_t *in = input;
    const int32_t *w = xor_weights;
    int32_t *out = xor_buf[0];
    int l, j, k = 0;
    for (l = 1; l < XOR_NUM_LAYERS; l++) {
        int prev = xor_layer_sizes[l - 1], cur = xor_layer_sizes[l];
        for (j = 0; j < cur; j++)
            out[j] = xor_activate(k + j, xor_neuron(w + j * (prev + 1), in, prev));
        w += cur * (prev + 1);
        k += cur;
        in = out;
        out = (out == xor_buf[0]) ? xor_buf[1] : xor_buf[0];
    }
    return (int32_t *)in;
}
