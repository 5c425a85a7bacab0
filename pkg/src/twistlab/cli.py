"""Command line front end.

Subcommands map onto the library verticals: suite verification, the
magnetic butterfly scan, eta and spectral flow for configured operators,
kernel Betti numbers, Sobolev norms with the derivation chain, and the
circle pairing.  Outputs are deterministic for fixed inputs and seeds:
JSON is emitted with sorted keys and one trailing newline, CSV with
exact %.17g floats.

Exit codes: 0 success, 1 a verification suite failed, 2 bad
configuration or arguments.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .algebra import AlgebraError, element_from_json
from .cohomology import derivation_chain, sobolev_norm
from .groups import (
    FreeAbelianGroup,
    GroupError,
    alternating_group,
    cyclic_group,
    group_from_json,
    symmetric_group,
    trivial_group,
    ProductGroup,
)
from .mishchenko import CircleCover, lott_pairing_circle
from .multipliers import MultiplierError, multiplier_from_json
from .representations import butterfly_rows
from .spectral import (
    MatrixPath,
    SpectralError,
    eta_operator,
    spectral_flow,
    twisted_betti,
    cycle_complex,
)
from .traces import TraceError
from .cohomology import CohomologyError
from .mishchenko import CoverError
from . import verify as verify_mod


class ConfigError(Exception):
    pass


_USER_ERRORS = (
    ConfigError,
    AlgebraError,
    GroupError,
    MultiplierError,
    SpectralError,
    TraceError,
    CohomologyError,
    CoverError,
    KeyError,
    ValueError,
    TypeError,
    OSError,
    json.JSONDecodeError,
)


def parse_group(spec):
    """Group from a short spec: z, z2, z3, sN, aN, cN, products with *, @file."""
    if isinstance(spec, dict):
        return group_from_json(spec)
    spec = str(spec).strip()
    if spec.startswith("@"):
        with open(spec[1:], "r", encoding="utf-8") as fh:
            return group_from_json(json.load(fh))
    if "*" in spec:
        left, _, right = spec.partition("*")
        return ProductGroup(parse_group(left), parse_group(right))
    if spec in ("1", "e"):
        return trivial_group()
    if spec == "z":
        return FreeAbelianGroup(1)
    if spec.startswith("z") and spec[1:].isdigit():
        return FreeAbelianGroup(int(spec[1:]))
    if spec.startswith("s") and spec[1:].isdigit():
        return symmetric_group(int(spec[1:]))
    if spec.startswith("a") and spec[1:].isdigit():
        return alternating_group(int(spec[1:]))
    if spec.startswith("c") and spec[1:].isdigit():
        return cyclic_group(int(spec[1:]))
    raise ConfigError(f"unrecognized group spec {spec!r}")


def parse_matrix(data) -> np.ndarray:
    if not isinstance(data, dict) or "re" not in data:
        raise ConfigError("matrix payload must be an object with 're' (and optional 'im')")
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise ConfigError("matrix 're' and 'im' must be equal-shape 2d arrays")
    return re + 1j * im


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return data


def element_from_config(cfg: dict):
    group = parse_group(cfg.get("group", "z2"))
    sigma = multiplier_from_json(cfg["multiplier"], group)
    element = element_from_json(sigma, {"terms": cfg["terms"]})
    return sigma, element


def emit(payload, out_path: str | None, as_json: bool = True) -> None:
    if as_json:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        text = payload
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args) -> int:
    names = verify_mod.suite_names() if args.suite == "all" else [args.suite]
    reports = [verify_mod.run_suite(name, args.seed) for name in names]
    payload = {
        "seed": args.seed,
        "passed": all(r.passed for r in reports),
        "suites": [r.to_json() for r in reports],
    }
    emit(payload, args.out)
    return 0 if payload["passed"] else 1


def _cmd_butterfly(args) -> int:
    coefficients = tuple(float(x) for x in args.coefficients.split(","))
    if len(coefficients) != 4:
        raise ConfigError("--coefficients takes four comma separated values")
    lines = list(butterfly_rows(args.qmax, args.kgrid, coefficients))
    emit("".join(line + "\n" for line in lines), args.out, as_json=False)
    return 0


def _eta_result_json(res) -> dict:
    out = {
        "eta": res.eta,
        "error_bound": res.error_bound,
        "method": res.method,
        "params": {k: (str(v) if not isinstance(v, (int, float)) else v)
                   for k, v in res.params.items()},
    }
    if res.germ is not None:
        out["germ"] = res.germ
    if res.kernel is not None:
        out["kernel"] = {
            "dim": res.kernel.dim,
            "zero_tol": res.kernel.zero_tol,
            "ambiguous": res.kernel.ambiguous,
        }
    return out


def _cmd_eta(args) -> int:
    cfg = load_config(args.config)
    kwargs = {
        "normalization": args.eta_normalization,
        "zero_tol": cfg.get("zero_tol"),
    }
    if "matrix" in cfg:
        res = eta_operator(parse_matrix(cfg["matrix"]), method="dense", **kwargs)
    else:
        sigma, element = element_from_config(cfg)
        method = cfg.get("method", "bloch")
        res = eta_operator(
            element,
            method=method,
            kgrid=int(cfg.get("kgrid", 64)),
            radius=int(cfg.get("radius", 8)),
            s_grid=cfg.get("s_grid"),
            t_max=cfg.get("t_max"),
            **kwargs,
        )
    emit(_eta_result_json(res), args.out)
    return 0


def _cmd_spectral_flow(args) -> int:
    cfg = load_config(args.config)
    pcfg = cfg.get("path", cfg)
    if "samples" in pcfg:
        path = MatrixPath.from_samples([parse_matrix(m) for m in pcfg["samples"]])
    elif pcfg.get("generator", "linear") == "linear":
        path = MatrixPath.linear(parse_matrix(pcfg["A0"]), parse_matrix(pcfg["A1"]))
    else:
        raise ConfigError(f"unknown path generator {pcfg.get('generator')!r}")
    res = spectral_flow(
        path,
        zero_tol=cfg.get("zero_tol"),
        initial_samples=int(cfg.get("initial_samples", 17)),
        max_refinements=int(cfg.get("max_refinements", 12)),
    )
    emit(
        {
            "flow": res.flow,
            "endpoint_formula": res.endpoint_formula,
            "samples": res.samples,
            "refinements": res.refinements,
            "crossings": [[l, r, s] for l, r, s in res.crossings],
        },
        args.out,
    )
    return 0


def _cmd_betti(args) -> int:
    cfg = load_config(args.config)
    if "cycle" in cfg:
        even, odd = cycle_complex(int(cfg["cycle"]))
    else:
        even = parse_matrix(cfg["even"])
        odd = parse_matrix(cfg["odd"])
    res = twisted_betti(even, odd, zero_tol=cfg.get("zero_tol"))
    emit(
        {
            "b_even": res.b_even,
            "b_odd": res.b_odd,
            "euler": res.euler,
            "index": res.index,
            "zero_tol": res.zero_tol,
            "ambiguous": res.ambiguous,
        },
        args.out,
    )
    return 0


def _cmd_sobolev(args) -> int:
    cfg = load_config(args.config)
    _, element = element_from_config(cfg)
    orders = cfg.get("s", [0, 1, 2])
    payload = {"norms": {str(s): sobolev_norm(element, float(s)) for s in orders}}
    if "chain_j_max" in cfg:
        chain = derivation_chain(element, j_max=int(cfg["chain_j_max"]))
        payload["chain"] = {
            "j_max": chain.j_max,
            "radius": chain.radius,
            "identity_defect": chain.identity_defect,
            "norms": chain.chain_norms,
            "constants": chain.bound_constants,
            "margins": chain.bound_margins,
            "bound_ok": chain.bound_ok,
        }
    emit(payload, args.out)
    return 0


def _cmd_pairing_circle(args) -> int:
    cover = CircleCover(args.winding)
    value = lott_pairing_circle(cover, n_grid=args.n_grid)
    emit({"winding": args.winding, "n_grid": args.n_grid, "pairing": value}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistlab",
        description="Twisted group algebra toolkit: multipliers, spectra, invariants.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run canonical self check suites")
    p.add_argument("--suite", default="all", choices=["all"] + verify_mod.suite_names())
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("butterfly", help="band spectra over rational flux values (CSV)")
    p.add_argument("--qmax", type=int, default=8)
    p.add_argument("--kgrid", type=int, default=64)
    p.add_argument("--coefficients", default="1,1,1,1",
                   help="four hopping coefficients c1,c2,c3,c4")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_butterfly)

    p = sub.add_parser("eta", help="eta invariant of a configured operator")
    p.add_argument("--config", required=True)
    p.add_argument("--eta-normalization", default="half", choices=["half", "full"])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_eta)

    p = sub.add_parser("spectral-flow", help="net eigenvalue flow along a matrix path")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_spectral_flow)

    p = sub.add_parser("betti", help="kernel traces of a two block complex")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_betti)

    p = sub.add_parser("sobolev", help="length weighted norms and the derivation chain")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_sobolev)

    p = sub.add_parser("pairing-circle", help="winding pairing of the circle projection")
    p.add_argument("--winding", type=int, default=1)
    p.add_argument("--n-grid", type=int, default=1024)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_pairing_circle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
