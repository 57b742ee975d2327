"""``tomokit run`` / ``tomokit validate`` command-line driver."""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import export
from .analysis_entropy import (
    COHERENT_ENTROPY,
    EntropyReport,
    entropic_squeezing_flag,
    info_entropy_1d,
)
from .analysis_patterns import (
    BLOB_DEFAULTS,
    STRAND_DEFAULTS,
    PatternConfig,
    blob_count,
    strand_count,
)
from .analysis_squeezing import (
    SectionMoments,
    SqueezingReport,
    StateMoments,
    SymmetricModeMoments,
    TomogramMoments,
    central_moment_from_slice,
    coherent_central_moment,
    eta_central_moment_direct,
    eta_distribution,
    hillery_Dq,
    quadrature_central_moment_direct,
)
from .config import ConfigError, RunConfig, load_config
from .dynamics_bec import evolve_bec
from .dynamics_single import evolve_single
from .fock import fidelity
from .tomography import (
    NormalizationDriftError,
    ThetaGrid,
    XGrid,
    tomogram_single,
    tomogram_two_section,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
ROW_TOL = 1e-8
SECTION_TOL = 1e-7


def _instant_label(cfg: RunConfig, i: int) -> str:
    v = cfg.times.values[i]
    if cfg.times.unit == "T_rev":
        return f"{v} T_rev"
    return f"t={v:.17g}"


def _state_label(cfg: RunConfig) -> str:
    s = cfg.initial
    if cfg.system == "SINGLE":
        extra = {"PACS": f" m={s.m}", "FOCK": f" n={s.n}", "TCS": f" n_max={s.n_max}"}.get(s.kind, "")
        return f"{s.kind} alpha={complex(s.alpha):.6g}{extra}"
    return f"psi{s.m1}{s.m2} alpha_a={complex(s.alpha_a):.6g} alpha_b={complex(s.alpha_b):.6g}"


def _grid_label(name: str, g) -> str:
    return f"{name}=[{g.x_min:.6g},{g.x_max:.6g}]x{g.count}"


def _pattern(cfg: RunConfig, key: str, default: PatternConfig) -> PatternConfig:
    p = cfg.pattern.get(key)
    if not p:
        return default
    return PatternConfig(p.get("relative_threshold", default.relative_threshold),
                         p.get("smoothing_width", default.smoothing_width))


class Pipeline:
    def __init__(self, cfg: RunConfig, out_dir: Path, threads: int):
        self.cfg = cfg
        self.out = out_dir
        self.threads = max(1, threads)
        self.files = []
        self.instants = cfg.instants()
        self.t_over = cfg.times.fractions_of_trev(cfg.period_float)
        if cfg.system == "SINGLE":
            self.state0 = cfg.initial.build(cfg.eps)
            radius = math.sqrt(self.state0.mean_number())
        else:
            self.state0 = evolve_bec(cfg.initial, cfg.hamiltonian, 0.0, cfg.eps)
            radius = math.sqrt(self.state0.mean_total_number())
        if cfg.x_max is not None:
            self.x_grid = XGrid(cfg.x_max, cfg.x_count)
        else:
            self.x_grid = XGrid.for_amplitude(radius, cfg.x_count)

    # ------------------------------------------------------------ per-instant work

    def state_at(self, t):
        if self.cfg.system == "SINGLE":
            return evolve_single(self.state0, self.cfg.hamiltonian, t)
        return evolve_bec(self.cfg.initial, self.cfg.hamiltonian, float(t), self.cfg.eps)

    def work(self, i: int) -> dict:
        cfg = self.cfg
        st = self.state_at(self.instants[i])
        g = self.x_grid
        res = {"i": i}
        want = {a.name for a in cfg.analyses}
        if cfg.system == "SINGLE":
            if want & {"TOMOGRAM", "STRANDS"}:
                tom = tomogram_single(st, ThetaGrid.uniform(cfg.theta_count), g)
                tom.check(ROW_TOL)
                res["tomogram"] = tom
                if "STRANDS" in want:
                    res["strands"] = strand_count(tom, _pattern(cfg, "strands", STRAND_DEFAULTS))
            if want & {"HONG_MANDEL", "ENTROPY"}:
                rows = tomogram_single(st, ThetaGrid(np.array([0.0, math.pi / 2])), g)
                rows.check(ROW_TOL)
                res["slice"] = rows.values[0]
                res["slice_perp"] = rows.values[1]
            if "HONG_MANDEL" in want:
                res["hm"] = {q: (central_moment_from_slice(res["slice"], g, 2 * q),
                                 quadrature_central_moment_direct(st, 2 * q))
                             for q in cfg.analysis("HONG_MANDEL").orders}
            if "HILLERY" in want:
                tm = TomogramMoments(st, g)
                sm = StateMoments(st)
                res["hillery"] = {q: (hillery_Dq(tm, q), hillery_Dq(sm, q))
                                  for q in cfg.analysis("HILLERY").orders}
            if "ENTROPY" in want:
                s0 = info_entropy_1d(res["slice"], g)
                s1 = info_entropy_1d(res["slice_perp"], g)
                res["entropy"] = (s0, s1)
        else:
            secs = {}
            needs_sections = want & {"TOMOGRAM", "BLOBS", "HONG_MANDEL"}
            if needs_sections:
                keys = cfg.sections if "TOMOGRAM" in want else ()
                keys = tuple(dict.fromkeys(keys + ((Fraction(0), Fraction(0)),)))
                for f1, f2 in keys:
                    sec = tomogram_two_section(st, math.pi * f1, math.pi * f2, g)
                    sec.check(SECTION_TOL)
                    secs[(f1, f2)] = sec
                res["sections"] = secs
            zero = secs.get((Fraction(0), Fraction(0)))
            if "BLOBS" in want:
                res["blobs"] = blob_count(zero, _pattern(cfg, "blobs", BLOB_DEFAULTS))
            if "HONG_MANDEL" in want:
                eta = eta_distribution(zero)
                res["hm"] = {q: (eta.central_moment(2 * q), eta_central_moment_direct(st, 2 * q))
                             for q in cfg.analysis("HONG_MANDEL").orders}
            if "HILLERY" in want:
                tm = SymmetricModeMoments(SectionMoments(st, g))
                sm = SymmetricModeMoments(StateMoments(st))
                res["hillery"] = {q: (hillery_Dq(tm, q), hillery_Dq(sm, q))
                                  for q in cfg.analysis("HILLERY").orders}
            if want & {"ENTROPY", "ENTANGLEMENT"}:
                rep = EntropyReport(cfg.angle_count, g)
                rep.add_state(self.t_over[i], st, entanglement=True)
                res["entropy"] = rep.rows()[0]
        if "REVIVAL_SCAN" in want:
            res["fidelity"] = fidelity(self.state0, st)
        return res

    # ------------------------------------------------------------ output

    def _add(self, path):
        self.files.append(Path(path))
        return path

    def _series_png(self, name, t, cols, reference=None, ylabel=""):
        if not self.cfg.figures:
            return
        from .plotting import render_series

        self._add(render_series(t, cols, self.out / f"{name}.png", reference, ylabel))

    def run(self) -> list:
        self.out.mkdir(parents=True, exist_ok=True)
        n = len(self.instants)
        if self.threads == 1:
            results = [self.work(i) for i in range(n)]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(self.work, range(n)))
        self.write(results)
        digest = hashlib.sha256(self.cfg.source_text.encode("utf-8")).hexdigest()
        export.write_manifest(self.out, self.files, digest)
        return self.files + [self.out / "manifest.json"]

    def write(self, results):
        cfg = self.cfg
        want = {a.name for a in cfg.analyses}
        t = self.t_over
        if "TOMOGRAM" in want:
            self._write_tomograms(results)
        if "STRANDS" in want or "BLOBS" in want:
            key = "strands" if "STRANDS" in want else "blobs"
            report = [r[key].as_dict(instant=_instant_label(cfg, r["i"])) for r in results]
            self._add(export.write_json(self.out / f"{key}.json", report))
        if "HONG_MANDEL" in want:
            modes = 1 if cfg.system == "SINGLE" else 2
            for q in cfg.analysis("HONG_MANDEL").orders:
                rep = SqueezingReport("HONG_MANDEL", q)
                for r in results:
                    tv, sv = r["hm"][q]
                    rep.add(t[r["i"]], tv, sv, coherent_central_moment(2 * q, modes))
                self._add(export.write_csv(self.out / rep.filename, rep.COLUMNS, rep.rows()))
                self._series_png(f"hong_mandel_q{q}", rep.t_over_trev,
                                 {"tomogram": rep.tomogram_value, "state": rep.state_value},
                                 rep.reference[0], f"order {2 * q} central moment")
        if "HILLERY" in want:
            for q in cfg.analysis("HILLERY").orders:
                rep = SqueezingReport("HILLERY", q)
                for r in results:
                    tv, sv = r["hillery"][q]
                    rep.add(t[r["i"]], tv, sv, 0.0)
                self._add(export.write_csv(self.out / rep.filename, rep.COLUMNS, rep.rows()))
                self._series_png(f"hillery_q{q}", rep.t_over_trev,
                                 {"tomogram": rep.tomogram_value, "state": rep.state_value},
                                 0.0, f"D_{q}")
        if want & {"ENTROPY", "ENTANGLEMENT"}:
            if cfg.system == "SINGLE":
                cols = ("t_over_Trev", "S_theta0", "S_theta_pi2", "entropic_squeezing")
                rows = [(t[r["i"]], *r["entropy"],
                         int(any(entropic_squeezing_flag(s) for s in r["entropy"])))
                        for r in results]
                self._add(export.write_csv(self.out / "entropy.csv", cols, rows))
                self._series_png("entropy", [x[0] for x in rows],
                                 {"S(0)": [x[1] for x in rows], "S(pi/2)": [x[2] for x in rows]},
                                 COHERENT_ENTROPY, "entropy (nats)")
            else:
                rows = [r["entropy"] for r in results]
                self._add(export.write_csv(self.out / "entropy.csv", EntropyReport.COLUMNS, rows))
                tt = [x[0] for x in rows]
                self._series_png("entropy", tt, {"S0_A": [x[1] for x in rows],
                                                 "S0_B": [x[2] for x in rows]},
                                 COHERENT_ENTROPY, "entropy (nats)")
                if "ENTANGLEMENT" in want:
                    self._series_png("entanglement", tt, {"S(A:B)": [x[3] for x in rows],
                                                          "SVNE": [x[4] for x in rows],
                                                          "SLE": [x[5] for x in rows]})
        if "REVIVAL_SCAN" in want:
            rows = [(t[r["i"]], r["fidelity"]) for r in results]
            self._add(export.write_csv(self.out / "revival_scan.csv", ("t_over_Trev", "fidelity"), rows))
            self._series_png("revival_scan", [x[0] for x in rows], {"fidelity": [x[1] for x in rows]})

    def _write_tomograms(self, results):
        cfg = self.cfg
        fig = None
        if cfg.figures:
            from . import plotting as fig
        state = _state_label(cfg)
        for r in results:
            i = r["i"]
            label = _instant_label(cfg, i)
            if cfg.system == "SINGLE":
                tom = r["tomogram"]
                stem = self.out / f"tomogram_{i:03d}"
                self._add(export.write_tomogram_csv(stem.with_suffix(".csv"), tom))
                self._add(export.write_pgm(stem.with_suffix(".pgm"), tom.values,
                                           comment=(f"rows=theta cols=X theta=[0,2pi)x{tom.theta_grid.count} "
                                                    f"{_grid_label('X', tom.x_grid)} state={state} "
                                                    f"instant={label}")))
                if fig:
                    self._add(fig.render_tomogram(tom, stem.with_suffix(".png"), label))
            else:
                for j, key in enumerate(cfg.sections):
                    sec = r["sections"][key]
                    stem = self.out / f"section_{i:03d}_{j:02d}"
                    self._add(export.write_section_csv(stem.with_suffix(".csv"), sec))
                    self._add(export.write_pgm(
                        stem.with_suffix(".pgm"), sec.values,
                        comment=(f"rows=X1 cols=X2 theta1={key[0]}pi theta2={key[1]}pi "
                                 f"{_grid_label('X1', sec.x1_grid)} {_grid_label('X2', sec.x2_grid)} "
                                 f"state={state} instant={label}")))
                    if fig:
                        self._add(fig.render_section(sec, stem.with_suffix(".png"), label))


def default_threads() -> int:
    return os.cpu_count() or 1


def resolve_out(cfg: RunConfig, flag) -> Path:
    env = os.environ.get("TOMOKIT_OUT")
    if env:
        return Path(env)
    if flag:
        return Path(flag)
    return Path(cfg.output or "tomokit_out")


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        for w in cfg.warnings():
            print(f"warning: {w}", file=sys.stderr)
        pipe = Pipeline(cfg, resolve_out(cfg, args.out), args.threads or default_threads())
        files = pipe.run()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NormalizationDriftError as exc:
        print(f"numerical diagnostic failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {len(files)} files to {pipe.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in cfg.summary():
        print(line)
    for w in cfg.warnings():
        print(f"warning: {w}")
    if cfg.times.unit == "T_rev" and cfg.period is None:
        print("config error: times.time_unit: revivals absent, times cannot be given in T_rev",
              file=sys.stderr)
        return EXIT_CONFIG
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tomokit", description="Optical tomograms of nonlinear bosonic dynamics.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="compute the artifacts described by a config")
    r.add_argument("config")
    r.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    r.add_argument("--out", default=None, help="output directory (TOMOKIT_OUT overrides)")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="check a config without computing")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
