"""C99 source emission.

Output per network ``<name>``:

* ``<name>.h``: dimensions and entry point; the parameter arrays sit behind
  ``#ifdef <NAME>_PARAMS_IMPL`` so only ``<name>.c`` instantiates them.
* ``<name>.c``: the run function ``<name>_type *<name>_run(const <name>_type *input)``.
* ``fann_shim.h``: target hooks with portable defaults.
* ``<name>_test.c``: optional harness with embedded samples and expected outputs.

Fixed-point code reproduces :func:`fannmcu.engine.forward_fixed` bit for bit:
each term is ``(int64 w * x) >> dp`` truncated to 32 bits, additions wrap
modulo 2**32, stepwise tables interpolate with truncating division.
"""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..engine.activation import real_breakpoints, round_half_away, stepwise_approx
from ..engine.interpreter import forward_fixed_batch, forward_float_batch, scale_inputs
from ..errors import FlavorMismatch
from ..memplan.placement import PlacementPlan, Strategy
from ..memplan.targets import Family, TargetDescriptor
from ..model.fannfile import ACTIVATION_IDS
from ..model.network import Dataset, Network
from .shim import SHIM_NAME, SHIM_TEXT

DEFAULT_MAX_SAMPLES = 100
FLOAT_TOLERANCE = 1e-4


class Flavor(enum.Enum):
    GENERIC_C = "GenericC"
    CORTEX_M = "CortexM"
    PULP_CLUSTER = "PulpCluster"


@dataclass(frozen=True)
class GeneratedSource:
    files: dict  # file name -> text
    flavor: Flavor
    entry_symbol: str
    name: str = "network"
    strategy: Optional[Strategy] = None

    def write(self, directory) -> list[str]:
        os.makedirs(directory, exist_ok=True)
        paths = []
        for fname, text in sorted(self.files.items()):
            path = os.path.join(directory, fname)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            paths.append(path)
        return paths

    @property
    def header(self) -> str:
        return self.files[f"{self.name}.h"]

    @property
    def source(self) -> str:
        return self.files[f"{self.name}.c"]


def partition(n: int, cores: int) -> list[int]:
    """Contiguous split of ``n`` items over ``cores``; the first ``n % cores``
    cores take one extra. Returns ``cores + 1`` boundaries."""
    q, r = divmod(n, cores)
    bounds = [0]
    for c in range(cores):
        bounds.append(bounds[-1] + q + (1 if c < r else 0))
    return bounds


def flavor_for(target: TargetDescriptor) -> Flavor:
    if target.family is Family.PULP_CLUSTER:
        return Flavor.PULP_CLUSTER
    if target.family is Family.CORTEX_M and target.name != "generic":
        return Flavor.CORTEX_M
    return Flavor.GENERIC_C


def c_identifier(name: str) -> str:
    ident = re.sub(r"\W", "_", name)
    if not ident or ident[0].isdigit():
        ident = "net_" + ident
    return ident


# ---------------------------------------------------------------- literals

def _float_lit(v: float) -> str:
    return f"{float(np.float32(v)):.9e}f"


def _lit(v, fixed: bool) -> str:
    return str(int(v)) if fixed else _float_lit(v)


def _array(ctype: str, name: str, rows: list[list[str]], comments=None, attr: str = "") -> str:
    count = sum(len(r) for r in rows)
    out = [f"static const {ctype} {attr}{name}[{max(count, 1)}] = {{"]
    for i, row in enumerate(rows):
        note = f" /* {comments[i]} */" if comments else ""
        out.append("    " + ", ".join(row) + ","+ note)
    if count == 0:
        out.append("    0,")
    out.append("};")
    return "\n".join(out)


# ---------------------------------------------------------------- context

@dataclass
class _Ctx:
    net: Network
    name: str
    NAME: str
    fixed: bool
    dp: int
    ctype: str
    cores: int
    strategy: Strategy
    tables: list = field(default_factory=list)  # [(kind, steepness)]
    neuron_table: list = field(default_factory=list)
    neuron_code: list = field(default_factory=list)
    neuron_steep: list = field(default_factory=list)


def _build_ctx(net: Network, name: str, cores: int, strategy: Strategy) -> _Ctx:
    fixed = net.is_fixed
    dp = net.decimal_point or 0
    ctx = _Ctx(net, name, name.upper(), fixed, dp, "int32_t" if fixed else "float", cores, strategy)
    index = {}
    for layer in net.layers[1:]:
        for n in layer.neurons:
            kind = n.activation
            if kind.is_sigmoid_family and (fixed or kind.is_stepwise):
                key = (kind.stepwise(), n.steepness)
                if key not in index:
                    index[key] = len(ctx.tables)
                    ctx.tables.append(key)
                ctx.neuron_table.append(index[key])
            else:
                ctx.neuron_table.append(-1)
            ctx.neuron_code.append(ACTIVATION_IDS[kind.stepwise() if fixed else kind])
            if fixed:
                ctx.neuron_steep.append(str(round_half_away(n.steepness * (1 << dp))))
            else:
                ctx.neuron_steep.append(_float_lit(n.steepness))
    return ctx


# ---------------------------------------------------------------- header

def _emit_header(ctx: _Ctx, target: TargetDescriptor, flavor: Flavor) -> str:
    net, N, n = ctx.net, ctx.NAME, ctx.name
    sizes = net.layer_sizes
    widest = max(sizes)
    max_row = max(sizes[:-1]) + 1
    out = [f"#ifndef {N}_H", f"#define {N}_H", "", "#include <stdint.h>", "",
           f"/* {'-'.join(map(str, sizes))} network, "
           f"{'fixed point, dp ' + str(ctx.dp) if ctx.fixed else 'float'}, "
           f"{flavor.value} flavor for {target.name} */", "",
           f"#define {N}_NUM_INPUTS {net.num_inputs}",
           f"#define {N}_NUM_OUTPUTS {net.num_outputs}",
           f"#define {N}_NUM_LAYERS {len(sizes)}",
           f"#define {N}_NUM_NEURONS {sum(sizes[1:])}",
           f"#define {N}_NUM_WEIGHTS {len(net.weights)}",
           f"#define {N}_MAX_WIDTH {widest}",
           f"#define {N}_MAX_ROW {max_row}"]
    if ctx.fixed:
        out.append(f"#define {N}_DECIMAL_POINT {ctx.dp}")
        out.append(f"#define {N}_MULTIPLIER {1 << ctx.dp}")
    if flavor is Flavor.PULP_CLUSTER:
        out.append(f"#define {N}_NUM_CORES {ctx.cores}")
        if ctx.strategy is Strategy.LAYER_WISE_DMA:
            out.append(f"#define {N}_MAX_LAYER_WEIGHTS "
                       f"{max((p + 1) * c for p, c in zip(sizes, sizes[1:]))}")
    out += ["", f"typedef {ctx.ctype} {n}_type;", "",
            f"{n}_type *{n}_run(const {n}_type *input);", "",
            f"#ifdef {N}_PARAMS_IMPL", ""]
    out.append(_array("int", f"{n}_layer_sizes", [[str(s) for s in sizes]]))
    out.append("")

    # weights, one destination neuron per line, bias last
    rows, notes = [], []
    pos = 0
    for li in range(1, len(sizes)):
        width = sizes[li - 1] + 1
        for j in range(sizes[li]):
            rows.append([_lit(w, ctx.fixed) for w in net.weights[pos:pos + width]])
            notes.append(f"L{li} n{j}")
            pos += width
    wattr = "FANN_L1 " if (flavor is Flavor.PULP_CLUSTER and ctx.strategy is Strategy.RESIDENT) else (
        "FANN_L2 " if flavor is Flavor.PULP_CLUSTER else "")
    out.append(_array(ctx.ctype, f"{n}_weights", rows, notes, wattr))
    out.append("")

    out.append(_array("uint8_t", f"{n}_neuron_act", [[str(c) for c in ctx.neuron_code]]))
    out.append(_array(ctx.ctype, f"{n}_neuron_steepness", [ctx.neuron_steep]))
    out.append(_array("int16_t", f"{n}_neuron_table", [[str(t) for t in ctx.neuron_table]]))
    out.append("")

    # stepwise tables: 6 x positions then 6 y values each
    txs, tys, tnotes = [], [], []
    for kind, steep in ctx.tables:
        if ctx.fixed:
            t = stepwise_approx(kind, steep, ctx.dp)
            xs, ys = [str(v) for v in t.xs], [str(v) for v in t.ys]
        else:
            rx, ry = real_breakpoints(kind, steep)
            xs, ys = [_float_lit(v) for v in rx], [_float_lit(v) for v in ry]
        txs.append(xs)
        tys.append(ys)
        tnotes.append(f"{kind.value} s={steep!r}")
    out.append(_array(ctx.ctype, f"{n}_table_x", txs, tnotes))
    out.append(_array(ctx.ctype, f"{n}_table_y", tys, tnotes))
    out += ["", f"#endif /* {N}_PARAMS_IMPL */", "", f"#endif /* {N}_H */", ""]
    return "\n".join(out)


# ---------------------------------------------------------------- source

def _activation_fn(ctx: _Ctx) -> str:
    n, N = ctx.name, ctx.NAME
    if ctx.fixed:
        if ctx.dp >= 1:
            linear = f"(int32_t)(uint32_t)(((int64_t)s * v) >> ({N}_DECIMAL_POINT - 1))"
        else:
            linear = "(int32_t)(uint32_t)(2 * (int64_t)s * v)"
        return f"""static int32_t {n}_activate(int k, int32_t v)
{{
    const int32_t *x, *y;
    int i;
    switch ({n}_neuron_act[k]) {{
    case 0: {{ /* linear, gain 2 * steepness */
        int32_t s = {n}_neuron_steepness[k];
        return {linear};
    }}
    case 1: /* threshold */
        return v < 0 ? 0 : {N}_MULTIPLIER;
    default: /* stepwise table */
        break;
    }}
    x = {n}_table_x + 6 * {n}_neuron_table[k];
    y = {n}_table_y + 6 * {n}_neuron_table[k];
    if (v < x[0])
        return y[0];
    if (v >= x[5])
        return y[5];
    for (i = 0; v >= x[i + 1]; i++)
        ;
    return y[i] + (int32_t)(((int64_t)(y[i + 1] - y[i]) * ((int64_t)v - x[i]))
                            / ((int64_t)x[i + 1] - x[i]));
}}
"""
    return f"""static float {n}_activate(int k, float v)
{{
    const float *x, *y;
    float s = {n}_neuron_steepness[k];
    int i;
    switch ({n}_neuron_act[k]) {{
    case 0: return 2.0f * s * v;
    case 1: return v < 0.0f ? 0.0f : 1.0f;
    case 3: return 1.0f / (1.0f + fann_expf(-2.0f * s * v));
    case 5: return fann_tanhf(s * v);
    default: break;
    }}
    x = {n}_table_x + 6 * {n}_neuron_table[k];
    y = {n}_table_y + 6 * {n}_neuron_table[k];
    if (v < x[0])
        return y[0];
    if (v >= x[5])
        return y[5];
    for (i = 0; v >= x[i + 1]; i++)
        ;
    return y[i] + (y[i + 1] - y[i]) * (v - x[i]) / (x[i + 1] - x[i]);
}}
"""


def _term(ctx: _Ctx, i: str) -> str:
    """One inner-loop statement: a multiply, a shift and an add."""
    if ctx.fixed:
        return (f"acc = (int32_t)((uint32_t)acc + (uint32_t)(((int64_t)row[{i}] * in[{i}])"
                f" >> {ctx.NAME}_DECIMAL_POINT));")
    return f"acc += row[{i}] * in[{i}];"


def _neuron_fn(ctx: _Ctx, flavor: Flavor) -> str:
    n, t = ctx.name, ctx.ctype
    zero = "0" if ctx.fixed else "0.0f"
    bias = ("acc = (int32_t)((uint32_t)acc + (uint32_t)row[prev]);" if ctx.fixed
            else "acc += row[prev];")
    body = ["/* weighted sum of one neuron; row holds prev weights then the bias */",
            f"static {t} {n}_neuron(const {t} *row, const {t} *in, int prev)", "{",
            f"    {t} acc = {zero};", "    int i = 0;"]
    if flavor is Flavor.CORTEX_M:
        if ctx.fixed:
            body += ["#ifdef FANN_HAVE_DOT",
                     f"    acc = fann_dot_q(row, in, prev, {ctx.NAME}_DECIMAL_POINT);",
                     "    i = prev;", "#endif"]
        body += ["    for (; i + 4 <= prev; i += 4) {"]
        body += ["        " + _term(ctx, f"i + {u}" if u else "i") for u in range(4)]
        body += ["    }"]
    elif flavor is Flavor.PULP_CLUSTER:
        body += ["    for (; i + 2 <= prev; i += 2) {",
                 "        " + _term(ctx, "i"), "        " + _term(ctx, "i + 1"), "    }"]
    body += ["    for (; i < prev; i++)", "        " + _term(ctx, "i"), "    " + bias,
             "    return acc;", "}", ""]
    return "\n".join(body)


def _source_prologue(ctx: _Ctx) -> list[str]:
    N, n = ctx.NAME, ctx.name
    return [f"#define {N}_PARAMS_IMPL", f'#include "{SHIM_NAME}"', f'#include "{n}.h"', ""]


def _run_serial(ctx: _Ctx) -> str:
    n, N, t = ctx.name, ctx.NAME, ctx.ctype
    return f"""static {t} {n}_buf[2][{N}_MAX_WIDTH];

{t} *{n}_run(const {t} *input)
{{
    const {t} *in = input;
    const {t} *w = {n}_weights;
    {t} *out = {n}_buf[0];
    int l, j, k = 0;
    for (l = 1; l < {N}_NUM_LAYERS; l++) {{
        int prev = {n}_layer_sizes[l - 1], cur = {n}_layer_sizes[l];
        for (j = 0; j < cur; j++)
            out[j] = {n}_activate(k + j, {n}_neuron(w + j * (prev + 1), in, prev));
        w += cur * (prev + 1);
        k += cur;
        in = out;
        out = (out == {n}_buf[0]) ? {n}_buf[1] : {n}_buf[0];
    }}
    return ({t} *)in;
}}
"""


def _partition_table(ctx: _Ctx) -> str:
    sizes = ctx.net.layer_sizes
    rows = [[str(b) for b in partition(c, ctx.cores)] for c in sizes[1:]]
    notes = [f"layer {li}" for li in range(1, len(sizes))]
    text = _array("int", f"{ctx.name}_partition", rows, notes)
    return ("/* contiguous neuron blocks per core, remainder to low cores;\n"
            "   entry [l * (NUM_CORES + 1) + c] is core c's first neuron of layer l + 1 */\n" + text + "\n")


def _run_cluster(ctx: _Ctx) -> str:
    n, N, t = ctx.name, ctx.NAME, ctx.ctype
    common = f"""typedef struct {{
    const {t} *in;
    {t} *out;
    const {t} *w;   /* weight rows of neuron first .. first + count - 1 */
    int prev;
    int first;      /* first neuron handled in this fork, layer-local */
    int count;
    int k;          /* global index of the layer's neuron 0 */
    const int *bounds;  /* static partition, or NULL to split count on the fly */
}} {n}_job;

static FANN_L1 {t} {n}_buf[2][{N}_MAX_WIDTH];
static FANN_L1 {t} {n}_input[{N}_NUM_INPUTS];

static void {n}_task(void *arg, int core)
{{
    const {n}_job *job = (const {n}_job *)arg;
    int lo, hi, j;
    if (job->bounds) {{
        lo = job->bounds[core];
        hi = job->bounds[core + 1];
    }} else {{
        int q = job->count / {N}_NUM_CORES, r = job->count % {N}_NUM_CORES;
        lo = core * q + (core < r ? core : r);
        hi = lo + q + (core < r ? 1 : 0);
    }}
    for (j = lo; j < hi; j++)
        job->out[job->first + j] = {n}_activate(job->k + job->first + j,
            {n}_neuron(job->w + j * (job->prev + 1), job->in, job->prev));
    fann_barrier();
}}

"""
    head = f"""{t} *{n}_run(const {t} *input)
{{
    {n}_job job;
    const {t} *in;
    {t} *out = {n}_buf[0];
    int l, k = 0;
    size_t woff = 0;
    fann_dma_wait(fann_dma_start({n}_input, input, sizeof {n}_input));
    in = {n}_input;
"""
    tail = f"""        k += cur;
        woff += (size_t)cur * (prev + 1);
        in = out;
        out = (out == {n}_buf[0]) ? {n}_buf[1] : {n}_buf[0];
    }}
    return ({t} *)in;
}}
"""
    loop = f"""    for (l = 1; l < {N}_NUM_LAYERS; l++) {{
        int prev = {n}_layer_sizes[l - 1], cur = {n}_layer_sizes[l];
        job.in = in;
        job.out = out;
        job.prev = prev;
        job.k = k;
"""
    if ctx.strategy is Strategy.RESIDENT:
        body = loop + f"""        job.w = {n}_weights + woff;
        job.first = 0;
        job.count = cur;
        job.bounds = {n}_partition + (l - 1) * ({N}_NUM_CORES + 1);
        fann_fork({N}_NUM_CORES, {n}_task, &job);
"""
        return common + _partition_table(ctx) + "\n" + head + body + tail

    if ctx.strategy is Strategy.LAYER_WISE_DMA:
        extra = f"""/* double-buffered layer weights in L1 */
static FANN_L1 {t} {n}_wbuf[2][{N}_MAX_LAYER_WEIGHTS];

"""
        body = f"""    int slot = 0;
    fann_dma_id next = 0;
    fann_dma_wait(fann_dma_start({n}_wbuf[0], {n}_weights,
                                 sizeof({t}) * ({n}_layer_sizes[0] + 1) * {n}_layer_sizes[1]));
""" + loop + f"""        size_t nbytes = 0;
        if (l + 1 < {N}_NUM_LAYERS) {{
            /* prefetch the next layer while this one computes */
            nbytes = sizeof({t}) * (size_t)(cur + 1) * {n}_layer_sizes[l + 1];
            next = fann_dma_start({n}_wbuf[slot ^ 1], {n}_weights + woff + (size_t)cur * (prev + 1), nbytes);
        }}
        job.w = {n}_wbuf[slot];
        job.first = 0;
        job.count = cur;
        job.bounds = {n}_partition + (l - 1) * ({N}_NUM_CORES + 1);
        fann_fork({N}_NUM_CORES, {n}_task, &job);
        if (nbytes)
            fann_dma_wait(next);
        slot ^= 1;
"""
        return common + extra + _partition_table(ctx) + "\n" + head + body + tail

    # neuron-wise: each step moves one row per core, the next step's rows
    # stream in while the current step computes
    extra = f"""/* double-buffered weight rows, one per core and step */
static FANN_L1 {t} {n}_rbuf[2][{N}_NUM_CORES * {N}_MAX_ROW];

"""
    body = loop + f"""        const {t} *lw = {n}_weights + woff;
        size_t row = (size_t)(prev + 1);
        int first, rows, slot = 0;
        fann_dma_id next = 0;
        rows = cur < {N}_NUM_CORES ? cur : {N}_NUM_CORES;
        fann_dma_wait(fann_dma_start({n}_rbuf[0], lw, sizeof({t}) * row * rows));
        for (first = 0; first < cur; ) {{
            int nfirst = first + rows;
            int nrows = cur - nfirst < {N}_NUM_CORES ? cur - nfirst : {N}_NUM_CORES;
            if (nrows > 0)
                next = fann_dma_start({n}_rbuf[slot ^ 1], lw + nfirst * row, sizeof({t}) * row * nrows);
            job.w = {n}_rbuf[slot];
            job.first = first;
            job.count = rows;
            job.bounds = 0;
            fann_fork({N}_NUM_CORES, {n}_task, &job);
            if (nrows > 0)
                fann_dma_wait(next);
            first = nfirst;
            rows = nrows;
            slot ^= 1;
        }}
"""
    return common + extra + head + body + tail


def _emit_source(ctx: _Ctx, flavor: Flavor) -> str:
    parts = ["\n".join(_source_prologue(ctx))]
    if flavor is Flavor.CORTEX_M and ctx.fixed:
        parts.append("#ifdef FANN_HAVE_DOT\n"
                     "int32_t fann_dot_q(const int32_t *w, const int32_t *x, int n, int dp);\n"
                     "#endif\n")
    parts.append(_activation_fn(ctx))
    parts.append(_neuron_fn(ctx, flavor))
    if flavor is Flavor.PULP_CLUSTER:
        parts.append(_run_cluster(ctx))
    else:
        parts.append(_run_serial(ctx))
    return "\n".join(parts)


# ---------------------------------------------------------------- harness

def expected_outputs(net: Network, x: np.ndarray) -> np.ndarray:
    """Reference outputs the harness compares against."""
    if net.is_fixed:
        return forward_fixed_batch(net, x)
    return forward_float_batch(net, x)


def harness_inputs(net: Network, ds: Dataset, max_samples: int) -> np.ndarray:
    x = ds.input_matrix()[:max_samples]
    if net.is_fixed:
        dp = net.format.decimal_point
        return np.asarray([scale_inputs(r, dp) for r in x], dtype=np.int64).reshape(x.shape)
    return x


def _emit_harness(ctx: _Ctx, ds: Dataset, max_samples: int) -> str:
    n, N, t = ctx.name, ctx.NAME, ctx.ctype
    x = harness_inputs(ctx.net, ds, max_samples)
    y = expected_outputs(ctx.net, x)
    ns = x.shape[0]
    xin = [[_lit(v, ctx.fixed) for v in r] for r in x.tolist()]
    yout = [[_lit(v, ctx.fixed) for v in r] for r in y.tolist()]
    fmt = '"%ld%s"' if ctx.fixed else '"%.9g%s"'
    cast = "(long)" if ctx.fixed else "(double)"
    if ctx.fixed:
        cmp = "out[j] != expected[s * NO + j]"
    else:
        cmp = f"fabs((double)out[j] - (double)expected[s * NO + j]) > {FLOAT_TOLERANCE!r}"
    return f"""/* Runs embedded samples, prints one output line per sample and
   returns the number of outputs that differ from the reference. */
#define FANN_HOST_IO
#include "{SHIM_NAME}"
#include "{n}.h"

#define NS {ns}
#define NI {N}_NUM_INPUTS
#define NO {N}_NUM_OUTPUTS

{_array(t, "inputs", xin or [["0"]])}

{_array(t, "expected", yout or [["0"]])}

int main(void)
{{
    int s, j, bad = 0;
    for (s = 0; s < NS; s++) {{
        const {t} *out = {n}_run(inputs + s * NI);
        for (j = 0; j < NO; j++) {{
            fann_printf({fmt}, {cast}out[j], j + 1 < NO ? " " : "\\n");
            if ({cmp})
                bad++;
        }}
    }}
    return bad > 255 ? 255 : bad;
}}
"""


# ---------------------------------------------------------------- entry

def generate(net: Network, target: TargetDescriptor, plan: PlacementPlan, *,
             name: str = "network", flavor: Optional[Flavor] = None,
             dataset: Optional[Dataset] = None,
             max_samples: int = DEFAULT_MAX_SAMPLES) -> GeneratedSource:
    """Emit C sources for ``net`` on ``target`` following ``plan``."""
    if not net.is_fixed and not target.has_fpu:
        raise FlavorMismatch(f"{target.name} has no FPU; convert the network to fixed point first")
    flavor = flavor or flavor_for(target)
    if plan.strategy is not Strategy.RESIDENT and flavor is not Flavor.PULP_CLUSTER:
        raise FlavorMismatch(f"{plan.strategy.value} needs the {Flavor.PULP_CLUSTER.value} flavor")
    name = c_identifier(name)
    cores = target.n_cores if flavor is Flavor.PULP_CLUSTER else 1
    ctx = _build_ctx(net, name, cores, plan.strategy)
    files = {
        f"{name}.h": _emit_header(ctx, target, flavor),
        f"{name}.c": _emit_source(ctx, flavor),
        SHIM_NAME: SHIM_TEXT,
    }
    if dataset is not None:
        files[f"{name}_test.c"] = _emit_harness(ctx, dataset, max_samples)
    return GeneratedSource(files, flavor, f"{name}_run", name, plan.strategy)
