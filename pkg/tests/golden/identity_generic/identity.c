#define IDENTITY_PARAMS_IMPL
#include "fann_shim.h"
#include "identity.h"

static float identity_activate(int k, float v)
{
    const float *x, *y;
    float s = identity_neuron_steepness[k];
    int i;
    switch (identity_neuron_act[k]) {
    case 0: return 2.0f * s * v;
    case 1: return v < 0.0f ? 0.0f : 1.0f;
    case 3: return 1.0f / (1.0f + fann_expf(-2.0f * s * v));
    case 5: return fann_tanhf(s * v);
    default: break;
    }
    x = identity_table_x + 6 * identity_neuron_table[k];
    y = identity_table_y + 6 * identity_neuron_table[k];
    if (v < x[0])
        return y[0];
    if (v >= x[5])
        return y[5];
    for (i = 0; v >= x[i + 1]; i++)
        ;
    return y[i] + (y[i + 1] - y[i]) * (v - x[i]) / (x[i + 1] - x[i]);
}

/* weighted sum of one neuron; row holds prev weights then the bias */
static float identity_neuron(const float *row, const float *in, int prev)
{
    float acc = 0.0f;
    int i = 0;
    for (; i < prev; i++)
        acc += row[i] * in[i];
    acc += row[prev];
    return acc;
}

static float identity_buf[2][IDENTITY_MAX_WIDTH];

float *identity_run(const float *input)
{
    const float *in = input;
    const float *w = identity_weights;
    float *out = identity_buf[0];
    int l, j, k = 0;
    for (l = 1; l < IDENTITY_NUM_LAYERS; l++) {
        int prev = identity_layer_sizes[l - 1], cur = identity_layer_sizes[l];
        for (j = 0; j < cur; j++)
            out[j] = identity_activate(k + j, identity_neuron(w + j * (prev + 1), in, prev));
        w += cur * (prev + 1);
        k += cur;
        in = out;
        out = (out == identity_buf[0]) ? identity_buf[1] : identity_buf[0];
    }
    return (float *)in;
}
