"""Command-line sweeps and figure recipes.

    ghzstab sweep --metric i --gamma-t 0,0.1,0.2 --m 1,2,3 --n 100
    ghzstab recipe fig1            (or: ghzstab fig1, ghzstab recipe --recipe fig1)

Exit status: 0 when every row is ok, 2 when some row is not, 1 on a bad
configuration.
"""

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import analytic, encodings, ptspec, pulsegen, qcore, tnet

HEADER = ["metric", "p", "gamma_t", "m", "N", "value", "aux", "status"]

METRICS = (
    "i0", "i", "j0_bound", "i_lower", "hs_ratio", "negativity", "beta", "lifetime",
    "fidelity", "max_n", "gme", "gme_projected", "index_q", "n_eff", "ec_offdiag",
    "cluster_j0", "tnet_relative_hs", "random_search", "pulse_compile",
)

# Metrics that read no noise parameter / no m / no N.
_NO_P = {"lifetime", "pulse_compile"}
_NO_M = {"ec_offdiag", "cluster_j0"}
_NO_N = {"i0", "j0_bound", "hs_ratio", "max_n", "ec_offdiag", "cluster_j0", "random_search", "beta"}

TNET_ENCODINGS = ("cghz", "cluster_ghz", "flat_ghz", "flat_cluster", "concat_ghz", "concat_cluster")


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    metric: str
    p: list = None
    gamma_t: list = None
    m: list = field(default_factory=list)
    N: list = field(default_factory=list)
    cutoff: float = 1e-10
    seed: int = 0
    options: dict = field(default_factory=dict)

    def validate(self):
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; choose from {', '.join(METRICS)}")
        if self.metric not in _NO_P:
            if (self.p is None) == (self.gamma_t is None):
                raise ConfigError("give exactly one of the p grid and the gamma_t grid")
            for v in self.p or []:
                if not 0 <= v <= 1:
                    raise ConfigError(f"p must lie in [0, 1], got {v}")
            for v in self.gamma_t or []:
                if not v >= 0:
                    raise ConfigError(f"gamma_t must be >= 0, got {v}")
        for name in ("m", "N"):
            for v in getattr(self, name):
                if int(v) != v or v < 1:
                    raise ConfigError(f"{name} values must be positive integers, got {v}")
        if self.metric == "beta" and len(self.N) == 1:
            raise ConfigError("beta needs an N window of at least two values")
        if not (self.cutoff == 0 or 1e-12 <= self.cutoff <= 1e-4):
            raise ConfigError("cutoff must be 0 or lie in [1e-12, 1e-4]")
        enc = self.options.get("encoding", "cghz")
        if self.metric == "tnet_relative_hs" and enc not in TNET_ENCODINGS:
            raise ConfigError(f"unknown tnet encoding {enc!r}")
        return self

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = {"metric", "p", "gamma_t", "m", "N", "cutoff", "seed", "options"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        if "metric" not in d:
            raise ConfigError("config has no metric")
        for k in ("p", "gamma_t"):
            if d.get(k) is not None:
                d[k] = [float(v) for v in d[k]]
        for k in ("m", "N"):
            d[k] = [int(v) for v in d.get(k) or []]
        return cls(**d)


@dataclass
class ResultRow:
    metric: str
    p: float
    gamma_t: float
    m: int
    N: int
    value: float
    aux: str = ""
    status: str = "ok"


# Grid and evaluation ------------------------------------------------------------


def _noise_points(cfg):
    if cfg.metric in _NO_P:
        return [(None, None)]
    if cfg.gamma_t is not None:
        return [(math.exp(-g), g) for g in cfg.gamma_t]
    return [(p, -math.log(p) if p > 0 else math.inf) for p in cfg.p]


def grid(cfg):
    """Cartesian grid in lexicographic (noise, m, N) order."""
    noise = _noise_points(cfg)
    if cfg.metric == "tnet_relative_hs":
        ms, Ns = sorted(set(cfg.m)) or [None], sorted(set(cfg.N)) or [None]
    else:
        ms = [None] if cfg.metric in _NO_M else sorted(set(cfg.m))
        Ns = [None] if cfg.metric in _NO_N else sorted(set(cfg.N))
    if cfg.metric == "beta" and not cfg.N:
        return []
    if cfg.metric == "random_search":
        return [(None, None, m, None) for m in ms]
    if cfg.metric == "beta":
        return [(p, g, m, None) for (p, g), m in itertools.product(noise, ms)]
    return [(p, g, m, N) for (p, g), m, N in itertools.product(noise, ms, Ns)]


def _tnet_value(enc, p, m, N):
    ch = qcore.depolarizing(p)
    if enc == "cghz":
        if m == 1:
            a, b = tnet.mps_basis(N, 0), tnet.mps_basis(N, 1)
        else:
            a, b = tnet.mps_codeword_product(N, m, 0), tnet.mps_codeword_product(N, m, 1)
    elif enc == "cluster_ghz":
        a, b = tnet.mps_cluster(N, 1), tnet.mps_cluster(N, -1)
    elif enc in ("flat_ghz", "flat_cluster"):
        fam = enc.split("_")[1]
        a, b = tnet.mps_flat_codeword(m, 0, fam), tnet.mps_flat_codeword(m, 1, fam)
    else:
        inner, outer = (N or 5), (m or 5)
        build = tnet.mps_concat_ghz if enc == "concat_ghz" else tnet.mps_concat_cluster
        a, b = build(1, inner, outer), build(-1, inner, outer)
    return tnet.noisy_relative_hs(a, b, ch)


def evaluate(cfg, point):
    """Rows for a single grid point (several for random_search)."""
    p, g, m, N = point
    metric = cfg.metric

    def row(value, aux="", p_=p, status="ok"):
        if status == "ok" and not (isinstance(value, int) or math.isfinite(value)):
            status = "nonfinite"
        return ResultRow(metric, p_, g, m, N, value, aux, status)

    try:
        if metric == "i0":
            return [row(analytic.i0_trace_norm(m, p))]
        if metric == "i":
            return [row(analytic.i_trace_norm(N, m, p))]
        if metric == "j0_bound":
            return [row(analytic.j0_upper_bound(m, p))]
        if metric == "i_lower":
            return [row(analytic.i_lower_bound(N, m, p))]
        if metric == "hs_ratio":
            return [row(analytic.hs_ratio(m, p))]
        if metric == "negativity":
            res = ptspec.negativity_profile(N, m, p, cfg.cutoff)
            return [row(res.value, f"groups={res.groups_used}")]
        if metric == "beta":
            res = ptspec.decay_rate_beta(m, p, cfg.N, cfg.cutoff)
            if res.beta is None:
                return [row(math.nan, "no plateau", status="no_plateau")]
            return [row(res.beta, f"window={res.window[0]}-{res.window[1]}")]
        if metric == "lifetime":
            kind = cfg.options.get("lifetime", "g0")
            if kind == "g0":
                value = ptspec.g0_lifetime(N, m)
            else:
                value = analytic.gme_lifetime(N, m, projected=(kind == "gme_projected"))
            if value is None:
                return [row(math.nan, kind, status="no_root")]
            return [row(value, kind)]
        if metric == "fidelity":
            return [row(analytic.distill_fidelity(N, m, p))]
        if metric == "max_n":
            res = analytic.max_distillable_N(m, p)
            return [row(res.n, "unbounded" if res.unbounded else "")]
        if metric == "gme":
            return [row(analytic.gme_alpha(N, m, p))]
        if metric == "gme_projected":
            return [row(analytic.gme_alpha_projected(N, m, p))]
        if metric == "index_q":
            return [row(ptspec.index_q_cghz(N, m, p))]
        if metric == "n_eff":
            return [row(ptspec.n_eff(N, m, p) / N, "relative")]
        if metric == "ec_offdiag":
            return [row(encodings.ec_corrected_offdiagonal(p))]
        if metric == "cluster_j0":
            return [row(analytic.cluster_j0_m5(p))]
        if metric == "tnet_relative_hs":
            enc = cfg.options.get("encoding", "cghz")
            return [row(_tnet_value(enc, p, m, N), enc)]
        if metric == "pulse_compile":
            seq = pulsegen.compile(N, m)
            ok = pulsegen.meets_target(seq, N, m)
            aux = f"z={seq.z_count};xi_total={seq.total_xi}"
            return [row(seq.ms_count, aux, status="ok" if ok else "target_missed")]
        if metric == "random_search":
            count = int(cfg.options.get("count", 1000))
            ps = [q for q, _ in _noise_points(cfg)]
            gts = dict(_noise_points(cfg))
            out = []
            for i, q, val in encodings.random_encoding_search(m, count, ps, cfg.seed):
                r = ResultRow(metric, q, gts[q], m, None, val, f"sample={i}")
                out.append(r)
            return out
    except qcore.CapacityError as exc:
        return [row(math.nan, str(exc), status="capacity")]
    except (ValueError, ArithmeticError) as exc:
        return [row(math.nan, str(exc), status="error")]
    raise ConfigError(f"metric {metric} is not wired")  # pragma: no cover


def _workers():
    cap = os.environ.get("GHZSTAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"GHZSTAB_THREADS must be an integer, got {cap!r}") from None
    return n


def _evaluate_packed(args):
    return evaluate(*args)


def run(cfg):
    cfg.validate()
    points = grid(cfg)
    if not points:
        return []
    workers = min(_workers(), len(points))
    if workers <= 1:
        chunks = [evaluate(cfg, pt) for pt in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate_packed, [(cfg, pt) for pt in points]))
    return [r for chunk in chunks for r in chunk]


# Output ---------------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        d = asdict(r)
        w.writerow([_fmt(d[k]) for k in HEADER])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return _fmt(v)
    return v


def to_json(rows):
    return json.dumps([{k: _json_value(asdict(r)[k]) for k in HEADER} for r in rows], indent=1) + "\n"


def _parse_cell(key, text):
    if key in ("metric", "aux", "status"):
        return text
    if text == "":
        return None
    if key in ("m", "N"):
        return int(text)
    if key == "value" and text.lstrip("-").isdigit():
        return int(text)
    return float(text)


def read_csv(text):
    rd = csv.reader(io.StringIO(text))
    header = next(rd)
    if header != HEADER:
        raise ValueError("unexpected CSV header")
    return [ResultRow(**{k: _parse_cell(k, c) for k, c in zip(HEADER, cells)}) for cells in rd]


def read_json(text):
    out = []
    for d in json.loads(text):
        d = {k: (float(v) if k in ("p", "gamma_t", "value") and isinstance(v, str) else v) for k, v in d.items()}
        out.append(ResultRow(**d))
    return out


def emit(rows, fmt="csv", path=None):
    text = to_csv(rows) if fmt == "csv" else to_json(rows)
    if path is None or path == "-":
        sys.stdout.write(text)
        return text
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


# Recipes --------------------------------------------------------------------------


def _frange(start, stop, step):
    n = int(round((stop - start) / step))
    return [round(start + i * step, 12) for i in range(n + 1)]


RECIPES = {
    # Coherence I of N=100 blocks vs gamma*t, plus the gap to the single-block bound.
    "fig1": [
        dict(metric="i", gamma_t=_frange(0, 1, 0.05), m=[1, 2, 3, 4, 5], N=[100]),
        dict(metric="j0_bound", gamma_t=_frange(0, 1, 0.05), m=[1, 2, 3, 4, 5]),
        dict(metric="i0", gamma_t=_frange(0, 1, 0.05), m=[1, 2, 3, 4, 5]),
    ],
    # Negativity at p = 0.8 and 0.95.
    "fig2": [dict(metric="negativity", p=[0.8, 0.95], m=[1, 2, 3, 4, 5], N=list(range(2, 41)))],
    # Distillation fidelity at p = 0.9 over a logarithmic N grid.
    "fig3": [
        dict(metric="fidelity", p=[0.9], m=list(range(1, 10)),
             N=sorted({2} | {int(round(10 ** (k / 4))) for k in range(2, 49)})),
        dict(metric="max_n", p=[0.9], m=list(range(1, 11))),
    ],
    # Negativity vs gamma*t at N = 30 and the single-eigenvalue lifetime bound.
    "fig4": [
        dict(metric="negativity", gamma_t=_frange(0, 1.2, 0.05), m=[1, 2, 3, 4, 5], N=[30], cutoff=0),
        dict(metric="lifetime", m=list(range(1, 11)), N=[10, 30, 100]),
    ],
    # Decay rate beta at p = 0.95.
    "fig5": [dict(metric="beta", p=[0.95], m=[1, 3, 5, 7],
                  N=list(range(40, 121, 2)) + list(range(130, 301, 10)), cutoff=1e-12)],
    # Large-N negativity for m = 7 in the group-truncated regime.
    "fig6": [dict(metric="negativity", p=[0.95], m=[7], N=[20, 50, 100, 150, 200, 250, 300], cutoff=1e-12)],
    # Relative index q at p = 0.9 and the error-corrected cluster block vs gamma*t.
    "fig7": [
        dict(metric="n_eff", p=[0.9], m=[1, 2, 3, 4], N=list(range(2, 41))),
        dict(metric="i0", gamma_t=_frange(0, 2, 0.1), m=[1, 5]),
        dict(metric="ec_offdiag", gamma_t=_frange(0, 2, 0.1)),
    ],
    # Single-block encoding comparison at p = 0.9 and the pulse compiler.
    "fig8": [
        dict(metric="i0", p=[0.9], m=list(range(1, 13))),
        dict(metric="cluster_j0", p=[0.9]),
        dict(metric="pulse_compile", m=[2, 3], N=[2, 3, 4, 5, 8]),
    ],
    # Cluster-GHZ vs C-GHZ relative HS norm at N = 100.
    "fig9": [
        dict(metric="tnet_relative_hs", gamma_t=_frange(0.05, 1, 0.05), N=[100], options={"encoding": "cluster_ghz"}),
        dict(metric="tnet_relative_hs", gamma_t=_frange(0.05, 1, 0.05), m=[1, 2, 3, 4, 5], N=[100],
             options={"encoding": "cghz"}),
    ],
    # Genuine multipartite entanglement coefficients at p = 0.95.
    "fig10": [
        dict(metric="gme", p=[0.95], m=[1, 2, 3, 4, 5], N=list(range(2, 31))),
        dict(metric="gme_projected", p=[0.95], m=[1, 2, 3, 4, 5], N=list(range(2, 31))),
    ],
    # Flat vs concatenated 25-qubit encodings.
    "fig11": [
        dict(metric="tnet_relative_hs", gamma_t=_frange(0.05, 1, 0.05), m=[25], options={"encoding": e})
        for e in ("flat_ghz", "flat_cluster")
    ] + [
        dict(metric="tnet_relative_hs", gamma_t=_frange(0.05, 1, 0.05), m=[5], N=[5], options={"encoding": e})
        for e in ("concat_ghz", "concat_cluster")
    ],
    # Random three-qubit codewords.
    "fig12": [dict(metric="random_search", p=_frange(0.5, 1, 0.05), m=[3], seed=0, options={"count": 1000})],
}


def run_recipe(name, out_dir="out", fmt="csv", overrides=None):
    if name not in RECIPES:
        raise ConfigError(f"unknown recipe {name!r}; choose from {', '.join(RECIPES)}")
    rows = []
    for spec in RECIPES[name]:
        d = dict(spec)
        d.update(overrides or {})
        rows.extend(run(SweepConfig.from_dict(d)))
    target = os.path.join(out_dir, name, f"{name}.{fmt}")
    emit(rows, fmt, target)
    return rows, target


# CLI ------------------------------------------------------------------------------


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _parser():
    ap = argparse.ArgumentParser(prog="ghzstab", description="Stability sweeps for GHZ-encoded states.")
    ap.add_argument("command", help="'sweep', 'recipe', or a recipe name such as fig1")
    ap.add_argument("name", nargs="?", help="recipe name after 'recipe'")
    ap.add_argument("--config", help="JSON sweep config; flags override its fields")
    ap.add_argument("--metric")
    ap.add_argument("--p", type=_floats)
    ap.add_argument("--gamma-t", dest="gamma_t", type=_floats)
    ap.add_argument("--m", type=_ints)
    ap.add_argument("--n", dest="N", type=_ints)
    ap.add_argument("--cutoff", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--recipe")
    return ap


def main(argv=None):
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    flags = {k: getattr(args, k) for k in ("metric", "p", "gamma_t", "m", "N", "cutoff", "seed")}
    flags = {k: v for k, v in flags.items() if v is not None}
    try:
        base = {}
        if args.config:
            with open(args.config) as fh:
                base = json.load(fh)
        if args.command == "sweep":
            base.update(flags)
            if "p" in flags:
                base.pop("gamma_t", None)
            if "gamma_t" in flags:
                base.pop("p", None)
            rows = run(SweepConfig.from_dict(base))
            emit(rows, args.format, args.out)
        else:
            name = args.recipe or (args.name if args.command == "recipe" else args.command)
            if not name:
                raise ConfigError("no recipe given")
            overrides = {k: v for k, v in flags.items() if k in ("cutoff", "seed")}
            rows, target = run_recipe(name, args.out or "out", args.format, overrides)
            print(target, file=sys.stderr)
    except (ConfigError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"ghzstab: {exc}", file=sys.stderr)
        return 1
    return 0 if all(r.status == "ok" for r in rows) else 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
