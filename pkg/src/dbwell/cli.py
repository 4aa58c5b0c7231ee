"""Command-line front end: batch experiment drivers emitting CSV.

Every command writes one CSV file with `#`-prefixed metadata lines
(tool version, profile hash, all parameters) followed by a column-name
row and comma-separated data at 12 significant digits, so identical
invocations produce byte-identical files.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .dynamics import crank_nicolson_reference, snapshot, time_series, _context, _resonances_for
from .errors import ConfigError, DomainError, NumericsError, ProfileParseError
from .onelevel import envelope, omega_from_gamma, one_level_density
from .potential import PotentialProfile, load_profile, preset, well_center
from .scattering import solve_energy_for_gamma, transmission
from .units import lifetime_from_width

_FMT = "{:.12g}"


def _fmt_row(values) -> str:
    return ",".join(_FMT.format(v) for v in values)


def _write_csv(path, meta: dict, columns, rows, footer: dict | None = None):
    lines = [f"# dbwell {__version__}"]
    for key in meta:
        lines.append(f"# {key} = {meta[key]}")
    lines.append(",".join(columns))
    lines.extend(_fmt_row(row) for row in rows)
    for key in footer or {}:
        lines.append(f"# {key} = {footer[key]}")
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _profile_from_args(args) -> PotentialProfile:
    if getattr(args, "preset", None):
        return preset(args.preset)
    return load_profile(args.profile)


def _profile_meta(args, profile: PotentialProfile) -> dict:
    return {
        "command": args.command,
        "profile": profile.label or "custom",
        "profile_hash": profile.digest(),
    }


def _grid(lo: float, hi: float, points: int) -> np.ndarray:
    if points < 2:
        raise ConfigError(f"need at least 2 grid points, got {points}")
    if not hi > lo:
        raise ConfigError(f"grid span must be positive, got [{lo}, {hi}]")
    return np.linspace(lo, hi, points)


def cmd_transmission(args) -> None:
    profile = _profile_from_args(args)
    energies = _grid(args.emin_mev, args.emax_mev, args.points) * 1e-3
    rows = [(e * 1e3, transmission(profile, e)) for e in energies]
    meta = _profile_meta(args, profile)
    meta.update(emin_mev=args.emin_mev, emax_mev=args.emax_mev, points=args.points)
    _write_csv(args.out, meta, ["E_meV", "T"], rows)


def cmd_poles(args) -> None:
    profile = _profile_from_args(args)
    resonances = _resonances_for(profile, args.count)
    rows = []
    for i, res in enumerate(resonances, start=1):
        rows.append(
            (
                i,
                res.eps * 1e3,
                res.gamma * 1e3,
                res.k_pole.real,
                res.k_pole.imag,
                res.gamma0 * 1e3,
                res.gammaL * 1e3,
                lifetime_from_width(res.gamma),
                int(res.fit_warning),
            )
        )
    meta = _profile_meta(args, profile)
    meta.update(count=args.count)
    _write_csv(
        args.out,
        meta,
        ["n", "eps_meV", "Gamma_meV", "Re_k_nm^-1", "Im_k_nm^-1", "Gamma0_meV", "GammaL_meV", "lifetime_ps", "fit_warning"],
        rows,
    )


def cmd_evolve(args) -> None:
    profile = _profile_from_args(args)
    x0 = args.x0_nm if args.x0_nm is not None else well_center(profile)
    energy = args.energy_mev * 1e-3
    resonances = _resonances_for(profile, args.pole_pairs)
    lifetime = lifetime_from_width(resonances[0].gamma)
    if args.taumax is not None:
        t_max = args.taumax * lifetime
    elif args.tmax_ps is not None:
        t_max = args.tmax_ps
    else:
        raise ConfigError("one of --tmax-ps / --taumax is required")
    t_grid = _grid(0.0, t_max, args.points)
    curve = time_series(profile, energy, x0, t_grid, pole_pairs=args.pole_pairs)
    _, sol, _ = _context(profile, energy, args.pole_pairs)
    phi2 = abs(sol.solution(np.array([x0]))[0]) ** 2
    rows = [
        (t, t / lifetime, d, d / phi2)
        for t, d in zip(curve.abscissa, curve.values)
    ]
    meta = _profile_meta(args, profile)
    meta.update(
        energy_mev=args.energy_mev, x0_nm=x0, points=args.points,
        pole_pairs=args.pole_pairs, stationary_density=_FMT.format(phi2),
    )
    _write_csv(args.out, meta, ["t_ps", "tau", "abs2", "abs2_over_phi2"], rows)


def cmd_snapshot(args) -> None:
    profile = _profile_from_args(args)
    energy = args.energy_mev * 1e-3
    times = [float(s) for s in args.times_ps.split(",") if s.strip()]
    if not times:
        raise ConfigError("--times-ps needs a comma-separated list of times")
    x_grid = _grid(0.0, profile.length, args.points)
    snap = snapshot(profile, energy, times, x_grid, pole_pairs=args.pole_pairs)
    columns = ["x_nm", "phi2"] + [f"psi2_t{i+1}" for i in range(len(times))]
    rows = []
    for i, x in enumerate(snap.x_grid):
        rows.append((x, snap.stationary_density[i], *(snap.densities[j][i] for j in range(len(times)))))
    meta = _profile_meta(args, profile)
    meta.update(
        energy_mev=args.energy_mev, times_ps=args.times_ps,
        points=args.points, pole_pairs=args.pole_pairs,
    )
    _write_csv(args.out, meta, columns, rows)


def cmd_onelevel(args) -> None:
    if args.gamma is not None:
        omega = omega_from_gamma(args.gamma)
    elif args.omega is not None:
        omega = args.omega
    else:
        raise ConfigError("one of --gamma / --omega is required")
    taus = _grid(0.0, args.taumax, args.points)
    rows = [(tau, one_level_density(tau, omega), envelope(tau)) for tau in taus]
    meta = {"command": args.command, "omega": _FMT.format(omega)}
    if args.gamma is not None:
        meta["gamma"] = args.gamma
    _write_csv(args.out, meta, ["tau", "one_level", "envelope"], rows)


def cmd_collapse(args) -> None:
    """Normalized buildup of several systems at one lineshape ratio gamma.

    Each system runs at its own energy eps_1 - omega(gamma) * Gamma_1 so
    the detuning in width units matches; curves are resampled on a shared
    tau grid where they collapse onto the one-level density.
    """
    names = [s.strip() for s in args.presets.split(",") if s.strip()]
    if not names:
        raise ConfigError("--presets needs a comma-separated list, e.g. A,B,C")
    omega = omega_from_gamma(args.gamma)
    taus = _grid(args.taumin, args.taumax, args.points)
    columns = ["tau"]
    curves = []
    energies = {}
    for name in names:
        profile = preset(name)
        resonances = _resonances_for(profile, args.pole_pairs)
        res1 = resonances[0]
        energy = solve_energy_for_gamma(profile, res1, args.gamma, side="below")
        energies[name] = energy
        lifetime = lifetime_from_width(res1.gamma)
        curve = time_series(
            profile, energy, well_center(profile), taus * lifetime,
            pole_pairs=args.pole_pairs, normalize=True,
        )
        curves.append(curve.values)
        columns.append(name)
    one_level = one_level_density(taus, omega)
    env = envelope(taus)
    curves.extend([one_level, env])
    columns.extend(["one_level", "envelope"])
    all_curves = curves[: len(names)] + [one_level]
    max_dev = 0.0
    for i in range(len(all_curves)):
        for j in range(i + 1, len(all_curves)):
            max_dev = max(max_dev, float(np.max(np.abs(all_curves[i] - all_curves[j]))))
    rows = [tuple(col[i] for col in [taus, *curves]) for i in range(len(taus))]
    meta = {
        "command": args.command,
        "gamma": args.gamma,
        "omega": _FMT.format(omega),
        "presets": ",".join(names),
        "taumin": args.taumin,
        "taumax": args.taumax,
        "points": args.points,
        "pole_pairs": args.pole_pairs,
    }
    meta.update({f"energy_mev_{n}": _FMT.format(energies[n] * 1e3) for n in names})
    footer = {"max_pairwise_deviation": _FMT.format(max_dev)}
    _write_csv(args.out, meta, columns, rows, footer)


def cmd_oracle(args) -> None:
    profile = _profile_from_args(args)
    x0 = args.x0_nm if args.x0_nm is not None else well_center(profile)
    energy = args.energy_mev * 1e-3
    t_grid = _grid(0.0, args.tmax_ps, args.points)[1:]  # CN starts after t=0
    curve = crank_nicolson_reference(profile, energy, x0, t_grid, dx=args.dx, dt=args.dt)
    rows = list(zip(curve.abscissa, curve.values))
    meta = _profile_meta(args, profile)
    meta.update(
        energy_mev=args.energy_mev, x0_nm=x0, tmax_ps=args.tmax_ps,
        points=args.points, dx=args.dx, dt=args.dt,
    )
    _write_csv(args.out, meta, ["t_ps", "abs2"], rows)


def _add_profile_args(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=["A", "B", "C"], help="built-in double-barrier system")
    group.add_argument("--profile", help="path to a profile config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbwell", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"dbwell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmission", help="T(E) sweep")
    _add_profile_args(p)
    p.add_argument("--emin-mev", type=float, default=1.0)
    p.add_argument("--emax-mev", type=float, default=200.0)
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transmission)

    p = sub.add_parser("poles", help="resonance poles, widths, lifetimes")
    _add_profile_args(p)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_poles)

    p = sub.add_parser("evolve", help="density versus time at fixed position")
    _add_profile_args(p)
    p.add_argument("--energy-mev", type=float, required=True)
    p.add_argument("--x0-nm", type=float, default=None, help="default: well center")
    p.add_argument("--tmax-ps", type=float, default=None)
    p.add_argument("--taumax", type=float, default=None, help="range in lifetimes instead of ps")
    p.add_argument("--points", type=int, default=600)
    p.add_argument("--pole-pairs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("snapshot", help="spatial density at fixed times")
    _add_profile_args(p)
    p.add_argument("--energy-mev", type=float, required=True)
    p.add_argument("--times-ps", required=True, help="comma-separated times, e.g. 0.04,0.4,0.8,1.2")
    p.add_argument("--points", type=int, default=301)
    p.add_argument("--pole-pairs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("onelevel", help="one-level density and envelope")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--taumax", type=float, default=15.0)
    p.add_argument("--points", type=int, default=300)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_onelevel)

    p = sub.add_parser("collapse", help="normalized buildup collapse across systems")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--presets", default="A,B,C")
    p.add_argument("--taumin", type=float, default=0.5)
    p.add_argument("--taumax", type=float, default=15.0)
    p.add_argument("--points", type=int, default=300)
    p.add_argument("--pole-pairs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("oracle", help="Crank-Nicolson reference run (slow)")
    _add_profile_args(p)
    p.add_argument("--energy-mev", type=float, required=True)
    p.add_argument("--x0-nm", type=float, default=None)
    p.add_argument("--tmax-ps", type=float, required=True)
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        args.func(args)
    except (ConfigError, ProfileParseError, DomainError) as exc:
        print(f"dbwell: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"dbwell: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"dbwell: i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
