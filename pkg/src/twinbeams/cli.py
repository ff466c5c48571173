"""Command-line front end.

Subcommands: fit, dist, quasi, simulate, report. Exit codes: 0 success,
1 input error, 2 physicality violation (report still written), 3 numerical
failure. Errors go to stderr as one JSON object per failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as tbio
from . import moments as mom
from .exceptions import (
    CancellationOverflowError,
    InsufficientMassError,
    TwinBeamError,
)
from .model import fit, k_s, nonclassicality_report
from .photodist import conditional, difference_pn, joint_pn
from .quasidist import difference_quasi, quasi_auto
from .sampling import SimConfig, sample_shots

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PHYSICALITY = 2
EXIT_NUMERICAL = 3


def _fail(exc, code):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    line = getattr(exc, "line", None)
    if line is not None:
        payload["line"] = line
    print(json.dumps(payload), file=sys.stderr)
    return code


def _outdir(ns):
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(out, ns):
    cfg = {k: v for k, v in vars(ns).items() if k != "func"}
    tbio.write_json(out / "config.json", cfg)


def _load_input_moments(ns):
    """Resolve --input (CSV shots or moment JSON) to photon-level moments."""
    path = Path(ns.input)
    eta = ns.eta
    noise = None
    if path.suffix.lower() == ".csv":
        data = tbio.read_shots_csv(path)
        ms = mom.reduce_shots(data)
    else:
        ms, file_eta, noise = tbio.read_moments_json(path)
        if eta is None:
            eta = file_eta
    if ms.level == mom.PHOTOELECTRON:
        if noise is not None:
            ms = mom.subtract_noise(ms, noise)
        if eta is None:
            eta = 1.0
        ms = mom.photoelectron_to_photon(ms, eta)
    if ms.level == mom.INTENSITY:
        ms = mom.intensity_to_photon(ms)
    return ms


def _fit_from_ns(ns):
    photon = _load_input_moments(ns)
    intensity = mom.photon_to_intensity(photon)
    model = fit(intensity, mode_policy=ns.modes_policy, modes=ns.modes)
    report = nonclassicality_report(model, photon)
    return model, report


def cmd_fit(ns):
    model, report = _fit_from_ns(ns)
    out = _outdir(ns)
    tbio.write_model_json(out / "model.json", model)
    tbio.write_json(out / "report.json", report.to_dict())
    (out / "report.txt").write_text(report.render_text() + "\n")
    _echo_config(out, ns)
    print(report.render_text())
    return EXIT_OK if model.is_physical else EXIT_PHYSICALITY


def cmd_report(ns):
    _, report = _fit_from_ns(ns)
    print(report.render_text())
    return EXIT_OK


def cmd_dist(ns):
    model = tbio.read_model_json(ns.model)
    out = _outdir(ns)
    joint = joint_pn(model, ns.grid_max, ns.grid_max) if ns.grid_max else joint_pn(model)
    if joint.captured_mass < 0.99:
        print(
            f"warning: grid captures only {joint.captured_mass:.6f} of the "
            "probability mass; increase --grid-max",
            file=sys.stderr,
        )
    tbio.write_joint_grid_csv(out / "joint.csv", joint)
    diff = difference_pn(joint)
    tbio.write_vector_csv(out / "pminus.csv", ["n", "p"], [diff.values, diff.probs])
    fano_at = ns.fano_at or []
    fano_rows = []
    for n1 in fano_at:
        c = conditional(joint, n1)
        fano_rows.append((n1, c.fano, c.fano_closed_form))
    if fano_rows:
        arr = np.array(fano_rows)
        tbio.write_vector_csv(out / "fano.csv", ["n1", "fano_empirical", "fano_closed_form"],
                              [arr[:, 0], arr[:, 1], arr[:, 2]])
    summary = {
        "captured_mass": joint.captured_mass,
        "n1_max": joint.n1_max,
        "n2_max": joint.n2_max,
        "grid_moments": joint.grid_moments().to_dict(),
        "difference": {"mean": diff.mean, "variance": diff.variance, "total": diff.total},
        "fano": [{"n1": int(r[0]), "empirical": r[1], "closed_form": r[2]} for r in fano_rows],
        "max_cancel_digits_seen": joint.max_cancel_digits_seen,
    }
    tbio.write_json(out / "summary.json", summary)
    _echo_config(out, ns)
    return EXIT_OK


def cmd_quasi(ns):
    model = tbio.read_model_json(ns.model)
    out = _outdir(ns)
    for s in ns.s:
        kw = {}
        if ns.w_max:
            ax = np.linspace(0.0, ns.w_max, ns.points)
            kw["w1_axis"] = ax
            kw["w2_axis"] = ax
        if ns.a_param is not None and k_s(model, s) < 0:
            kw["a_param"] = ns.a_param
        grid = quasi_auto(model, s, **kw)
        tag = f"s{s:+.4g}".replace("+", "")
        tbio.write_matrix_csv(out / f"quasi_{tag}.csv", grid.values,
                              row_axis=grid.w1_axis, col_axis=grid.w2_axis)
        tbio.write_json(out / f"quasi_{tag}_meta.json", grid.meta())
        dq = difference_quasi(grid)
        tbio.write_vector_csv(out / f"pdiff_{tag}.csv", ["w", "p"], [dq.w_axis, dq.values])
        print(f"s={s}: regime={grid.regime} K_s={grid.k_s:.6g}")
    _echo_config(out, ns)
    return EXIT_OK


def cmd_simulate(ns):
    model = tbio.read_model_json(ns.model)
    cfg = SimConfig(model=model, shots=ns.shots, eta=ns.eta if ns.eta is not None else 1.0,
                    seed=ns.seed)
    data = sample_shots(cfg)
    out = _outdir(ns)
    tbio.write_shots_csv(out / "shots.csv", data.shots)
    _echo_config(out, ns)
    return EXIT_OK


def _int_list(text):
    return [int(tok) for tok in text.split(",") if tok.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="twinbeams",
        description="Twin-beam photocount statistics: model fitting, "
                    "photon-number distributions, nonclassicality reports and "
                    "intensity quasi-distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_fit_args(p):
        p.add_argument("--input", required=True,
                       help="per-shot CSV (shot,m1,m2) or moment JSON")
        p.add_argument("--eta", type=float, default=None,
                       help="detection efficiency (overrides the JSON value)")
        p.add_argument("--modes-policy", default="mean",
                       choices=["mean", "arm1", "arm2", "explicit"])
        p.add_argument("--modes", type=float, default=None,
                       help="mode number for --modes-policy explicit")

    p = sub.add_parser("fit", help="fit the model and write model + report")
    add_fit_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="print the nonclassicality report")
    add_fit_args(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("dist", help="joint, conditional and difference distributions")
    p.add_argument("--model", required=True, help="model JSON from fit")
    p.add_argument("--grid-max", type=int, default=None,
                   help="truncate both axes at this photon number")
    p.add_argument("--fano-at", type=_int_list, default=None,
                   help="comma-separated signal photon numbers for the Fano table")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("quasi", help="s-ordered intensity quasi-distributions")
    p.add_argument("--model", required=True)
    p.add_argument("--s", type=float, action="append", required=True,
                   help="ordering parameter in [-1, 1]; repeatable")
    p.add_argument("--a-param", type=float, default=None,
                   help="oscillation rate constant for the K_s < 0 regime")
    p.add_argument("--w-max", type=float, default=None)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quasi)

    p = sub.add_parser("simulate", help="draw seeded per-shot counts from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (CancellationOverflowError, InsufficientMassError) as e:
        return _fail(e, EXIT_NUMERICAL)
    except TwinBeamError as e:
        return _fail(e, EXIT_INPUT)
    except (OSError, ValueError) as e:
        return _fail(e, EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
