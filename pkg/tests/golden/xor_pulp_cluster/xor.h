#ifndef XOR_H
#define XOR_H

#include <stdint.h>

/* 2-2-1 network, fixed point, dp 27, PulpCluster flavor for pulp-cluster */

#define XOR_NUM_INPUTS 2
#define XOR_NUM_OUTPUTS 1
#define XOR_NUM_LAYERS 3
#define XOR_NUM_NEURONS 3
#define XOR_NUM_WEIGHTS 9
#define XOR_MAX_WIDTH 2
#define XOR_MAX_ROW 3
#define XOR_DECIMAL_POINT 27
#define XOR_MULTIPLIER 134217728
#define XOR_NUM_CORES 8

typedef int32_t xor_type;

xor_type *xor_run(const xor_type *input);

#ifdef XOR_PARAMS_IMPL

static const int xor_layer_sizes[3] = {
    2, 2, 1,
};

static const int32_t FANN_L1 xor_weights[9] = {
    268435456, 268435456, 268435456, /* L1 n0 */
    268435456, 268435456, -268435456, /* L1 n1 */
    268435456, -268435456, -268435456, /* L2 n0 */
};

static const uint8_t xor_neuron_act[3] = {
    6, 6, 6,
};
static const int32_t xor_neuron_steepness[3] = {
    134217728, 134217728, 134217728,
};
static const int16_t xor_neuron_table[3] = {
    0, 0, 0,
};

static const int32_t xor_table_x[6] = {
    -355227674, -197597955, -73726623, 73726623, 197597955, 355227674, /* sigmoid_symmetric_stepwise s=1.0 */
};
static const int32_t xor_table_y[6] = {
    -132875551, -120795955, -67108864, 67108864, 120795955, 132875551, /* sigmoid_symmetric_stepwise s=1.0 */
};

#endif /* XOR_PARAMS_IMPL */

#endif /* XOR_H */
