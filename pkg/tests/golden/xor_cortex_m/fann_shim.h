#ifndef FANN_SHIM_H
#define FANN_SHIM_H

/* Target shim for generated network code.
 *
 * Defaults are portable C99: DMA is a blocking copy, fork runs the task for
 * every core in turn, the barrier does nothing. Define a hook before this
 * header to replace it with the vendor call.
 */

#include <stddef.h>
#include <stdint.h>

/* memory placement attributes */
#ifndef FANN_L1
#define FANN_L1
#endif
#ifndef FANN_L2
#define FANN_L2
#endif

/* DMA: start a copy, get a handle, wait on it */
#ifndef FANN_HAVE_DMA
typedef int fann_dma_id;
static inline fann_dma_id fann_dma_start(void *dst, const void *src, size_t bytes)
{
    unsigned char *d = (unsigned char *)dst;
    const unsigned char *s = (const unsigned char *)src;
    while (bytes--)
        *d++ = *s++;
    return 0;
}
static inline void fann_dma_wait(fann_dma_id id) { (void)id; }
#endif

/* cluster fork/join and barrier */
#ifndef FANN_HAVE_FORK
typedef void (*fann_task_fn)(void *arg, int core);
static inline void fann_fork(int n_cores, fann_task_fn fn, void *arg)
{
    int c;
    for (c = 0; c < n_cores; c++)
        fn(arg, c);
}
static inline void fann_barrier(void) {}
#endif

/* math for float networks */
#ifndef FANN_HAVE_MATH
#include <math.h>
#define fann_expf expf
#define fann_tanhf tanhf
#endif

/* host I/O, only for test harnesses */
#ifdef FANN_HOST_IO
#include <stdio.h>
#define fann_printf printf
#endif

#endif /* FANN_SHIM_H */
