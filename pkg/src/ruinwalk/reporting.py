"""Report rendering: human-readable text and machine-readable CSV tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .pipeline import RunReport

MACHINE_DIGITS = 12
HUMAN_DIGITS = 6


def _m(x: float) -> str:
    return f"{float(x):.{MACHINE_DIGITS}g}"


def _h(x: float) -> str:
    return f"{float(x):.{HUMAN_DIGITS}g}"


def render_report(report: RunReport, *, include_timings: bool = True) -> str:
    lines: list[str] = []
    add = lines.append
    add("ruinwalk run report")
    add("=" * 40)
    add(f"config: {json.dumps(report.config, sort_keys=True)}")
    add(f"status: {report.status}")
    add(f"mean claim: {_h(report.mean_claim)}   premium rate: {report.kappa}")
    add(
        f"effective premium rate: {report.kappa_eff} (support shift {report.reduction_shift}); "
        f"lattice span: {report.lattice}"
    )
    add("")
    add("unit-disk roots of the characteristic equation")
    if report.roots:
        for r in report.roots:
            tag = " (boundary)" if r["on_boundary"] else ""
            add(
                f"  {_h(r['re'])} {'+' if r['im'] >= 0 else '-'} {_h(abs(r['im']))}i  "
                f"multiplicity {r['multiplicity']}{tag}"
            )
    else:
        add("  none required")
    add("")
    add("supremum pmf (boundary probabilities)")
    for i, v in enumerate(report.sup_mass):
        add(f"  P(M={i}) = {_h(v)}")
    add(f"  solve residual {_h(report.sup_residual)}, imaginary leak {_h(report.sup_imag_leak)}")
    add("")
    add(f"ultimate survival (method: {report.survival.method})")
    upto = min(report.survival.phi.size, 11)
    for u in range(upto):
        add(f"  phi({u}) = {_h(report.survival.phi[u])}")
    if report.survival.phi.size > upto:
        add(f"  ... through u = {report.survival.phi.size - 1} (see survival.csv)")
    add("")
    if report.mc is not None:
        add("monte carlo verification")
        for i, u in enumerate(report.mc.u):
            add(
                f"  u={int(u)}: estimate {_h(report.mc.phi_hat[i])} "
                f"(std err {_h(report.mc.std_err[i])}, horizon bias <= {_h(report.mc_bias[i])})"
            )
        add("")
    if report.stationarity is not None:
        s = report.stationarity
        add(
            f"stationarity push: TV = {_h(s.tv)} vs noise scale {_h(s.sampling_noise)} "
            f"({s.paths} paths, horizon {s.horizon})"
        )
        add("")
    if report.sequence_limits is not None:
        l = report.sequence_limits
        add(
            f"recurrent-sequence limits: phi(0) ~ {_h(l.phi0)}, phi(1) ~ {_h(l.phi1)} "
            f"(stopped at n={l.stopped_at})"
        )
        add("")
    add("checks")
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        add(f"  [{mark}] {c.name}: {_h(c.value)} <= {_h(c.bound)}")
    if report.warnings:
        add("")
        add("notes")
        for w in report.warnings:
            add(f"  - {w}")
    if include_timings and report.timings:
        add("")
        add("timings (s)")
        for k, v in report.timings.items():
            add(f"  {k}: {v:.3f}")
    add("")
    return "\n".join(lines)


def write_outputs(
    report: RunReport,
    outdir: str | Path,
    *,
    fmt: str = "both",
    include_timings: bool = True,
) -> list[Path]:
    """Write report.txt and/or the CSV tables; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if fmt in ("report", "both"):
        path = outdir / "report.txt"
        path.write_text(render_report(report, include_timings=include_timings))
        written.append(path)
    if fmt in ("csv", "both"):
        path = outdir / "survival.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "phi"])
            for u, v in enumerate(report.survival.phi):
                w.writerow([u, _m(v)])
        written.append(path)

        path = outdir / "finite_time.csv"
        grid = report.finite_time
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "t", "phi"])
            t_max, u_max = grid.phi.shape
            for t in range(1, t_max + 1):
                for u in range(u_max):
                    w.writerow([u, t, _m(grid.phi[t - 1, u])])
        written.append(path)

        path = outdir / "roots.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "multiplicity", "on_boundary"])
            for r in report.roots:
                w.writerow([_m(r["re"]), _m(r["im"]), r["multiplicity"], r["on_boundary"]])
        written.append(path)

        path = outdir / "verification.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["check", "value", "bound", "passed"])
            for c in report.checks:
                w.writerow([c.name, _m(c.value), _m(c.bound), c.passed])
        written.append(path)
    return written
