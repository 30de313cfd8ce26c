### cli
## Command-line entry point: `python -m pyfiles.cli <subcommand> [flags]`.
## Subcommands: trajectory, derivative-dist, sao, stationarity, verify.
## Exit codes: 0 when every check passes, 1 when one fails, 2 on a usage error.

## Imports
# Third-party modules
import argparse
import json
import math
import os
import sys
import numpy as np
import pandas as pd

from pathlib import Path
from pydantic import ValidationError

from typing import (
    Any,
    Dict,
    List,
    Optional,
    Tuple
)

# Internal modules
from validators.airy_types import RunConfig
from pyfiles.logger import (
    logger,
    with_spinner
)
from pyfiles.randvar import (
    GammaParams,
    RngStream,
    sample_brownian_grid,
    zero_grid
)
from pyfiles.hermite_ensemble import BetaEnsembleSpec
from pyfiles.minor_process import (
    TrajectorySummary,
    compute_trajectory,
    spectral_weight_samples,
    stationarity_samples,
    trajectory_table,
    write_summary_json,
    write_trajectory_csv
)
from pyfiles.sao_discrete import (
    export_path_csv,
    sample_path_ensemble,
    sao_table,
    stationarity_shift_check,
    write_sao_csv
)
from pyfiles.stats import (
    TestReport,
    gamma_cdf,
    ks_one_sample,
    ks_two_sample,
    moments
)
from pyfiles.verification import (
    run_verification,
    write_verification_json
)


## Constants
# Environment variable overriding the default seed
SEED_ENV: str = 'AIRY_SEED'
# Output file when --out is not given
DEFAULT_OUTPUTS: Dict[str, str] = {
    'trajectory': 'trajectory',
    'derivative-dist': 'derivative-dist',
    'sao': 'sao',
    'stationarity': 'stationarity',
    'verify': 'verify-report',
}


def parse_beta(value: str) -> float:
    """
    A Dyson index flag: a positive number or the literal `inf`.
    """
    try:
        beta = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"beta should be a positive number or `inf`, instead got `{value}`")
    if not beta > 0:
        raise argparse.ArgumentTypeError(f"beta should be positive, instead got `{value}`")
    return beta


def read_config_file(path: str | Path) -> Dict[str, str]:
    """
    `key=value` lines, `#` comments and blank lines ignored; dashes in keys become underscores.
    """
    values: Dict[str, str] = {}
    for number, line in enumerate(Path(path).read_text(encoding='UTF-8').splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        if not sep:
            raise ValueError(f"Line {number} of `{path}` is not a key=value pair: `{line}`")
        key = key.strip().lstrip('-').replace('-', '_')
        values['out_path' if key == 'out' else key] = value.strip()
    return values


def build_parser(file_defaults: Optional[Dict[str, str]] = None) -> argparse.ArgumentParser:
    """
    The argument parser, one subparser per subcommand sharing the common flags.

    `file_defaults` replace the built-in defaults; argparse converts string defaults
    with each flag's `type`, so file values are parsed like flags.
    """
    default_seed = int(os.environ.get(SEED_ENV, '0'))

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help="key=value file pre-populating flags; flags win")
    common.add_argument('--beta', type=parse_beta, default=2.0, help="Dyson index, or `inf` for no noise")
    common.add_argument('--n', type=int, default=None, help="matrix size")
    common.add_argument('--num-eigs', type=int, default=5, help="lowest eigenvalues tracked")
    common.add_argument('--t-max', type=float, default=2.0, help="last boundary position")
    common.add_argument('--dt', type=float, default=0.01, help="boundary-position step")
    common.add_argument('--t-star', type=float, default=1.0, help="shift compared against t = 0")
    common.add_argument('--h', type=float, default=5e-4, help="SAO mesh")
    common.add_argument('--L', type=float, default=None, help="SAO right end / domain length (sao: clears the tracked eigenfunctions; otherwise 8)")
    common.add_argument('--window', type=int, default=20, help="SAO difference window in cells")
    common.add_argument('--reps', type=int, default=100, help="Monte Carlo replicas")
    common.add_argument('--seed', type=int, default=default_seed, help=f"master seed (default from ${SEED_ENV} or 0)")
    common.add_argument('--threads', type=int, default=1, help="worker threads")
    common.add_argument('--out', dest='out_path', type=str, default=None, help="output file")
    common.add_argument('--format', choices=['csv', 'json'], default='csv', help="output format")
    if file_defaults:
        common.set_defaults(**file_defaults)

    parser = argparse.ArgumentParser(
        prog='airy-minor',
        description="Edge-eigenvalue processes of β-Hermite minors and the stochastic Airy operator"
    )
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    subparsers.add_parser('trajectory', parents=[common], help="scaled eigenvalue trajectories of one draw")
    subparsers.add_parser('derivative-dist', parents=[common], help="spectral-weight derivative samples and KS")
    subparsers.add_parser('sao', parents=[common], help="SAO eigenvalues, slopes and difference quotients")
    stationarity = subparsers.add_parser('stationarity', parents=[common], help="Λ_1(0) against Λ_1(t*) − t*")
    stationarity.add_argument('--model', choices=['matrix', 'sao'], help="matrix minors or the SAO (default matrix)")
    verify = subparsers.add_parser('verify', parents=[common], help="acceptance criteria")
    verify.add_argument('--quick', action='store_true', help="exact criteria only, reduced scale")
    verify.add_argument('--criteria', type=int, nargs='+', default=None, help="run only these criteria")
    return parser


def resolve_config(argv: Optional[List[str]] = None) -> Tuple[RunConfig, argparse.Namespace]:
    """
    Parse flags over an optional config file and validate the result.

    Exits with status 2 on any usage or validation error.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config', default=None)
    known, _ = pre.parse_known_args(argv)

    file_values: Dict[str, str] = {}
    if known.config:
        try:
            file_values = read_config_file(known.config)
        except (OSError, ValueError) as e:
            build_parser().error(str(e))
    parser = build_parser(file_values)
    args = parser.parse_args(argv)

    fields = {key: value for key, value in vars(args).items() if key in RunConfig.model_fields and value is not None}
    if 'beta' in fields and isinstance(fields['beta'], str):
        fields['beta'] = parse_beta(fields['beta'])
    try:
        return RunConfig(**fields), args
    except ValidationError as e:
        parser.error('; '.join(err['msg'] for err in e.errors()))
    except ValueError as e:
        parser.error(str(e))


## Output helpers

def _output_path(cfg: RunConfig, suffix: Optional[str] = None) -> Path:
    path = Path(cfg.out_path) if cfg.out_path else Path(DEFAULT_OUTPUTS[cfg.subcommand] + '.' + cfg.format)
    return path.with_suffix(suffix) if suffix else path


def _echo(cfg: RunConfig) -> Dict[str, Any]:
    return cfg.model_dump(mode='json')


def _write_table(table: pd.DataFrame, path: Path, cfg: RunConfig, seed: Dict[str, Any]) -> Path:
    if cfg.format == 'json':
        payload = {'config': _echo(cfg), 'seed': seed, 'rows': json.loads(table.to_json(orient='records', double_precision=15))}
        path.write_text(json.dumps(payload, indent=2) + '\n', encoding='UTF-8')
        logger.info(f'📝 Table written to `{path}`')
        return path
    header = {**_echo(cfg), **{f'seed.{k}': v for k, v in seed.items()}}
    with open(path, 'w', encoding='UTF-8', newline='') as handle:
        handle.write(''.join(f'# {key}={value}\n' for key, value in header.items()))
        table.to_csv(handle, index=False, lineterminator='\n', float_format='%.12g')
    logger.info(f'📝 Table written to `{path}`')
    return path


def _exit_code(reports: List[TestReport]) -> int:
    return 0 if all(r.passed for r in reports) else 1


## Subcommands

def cmd_trajectory(cfg: RunConfig) -> int:
    """
    One draw, its scaled edge-eigenvalue trajectories as a table, and a JSON summary.
    """
    spec = BetaEnsembleSpec(n=cfg.n, beta=cfg.beta)
    stream = RngStream(master_seed=cfg.seed)
    with with_spinner(f"Trajectory n={cfg.n} β={cfg.beta}"):
        traj = compute_trajectory(spec, stream, cfg.num_eigs, cfg.t_max, cfg.dt)

    out = _output_path(cfg)
    if cfg.format == 'csv':
        write_trajectory_csv(traj, out, _echo(cfg))
    else:
        _write_table(trajectory_table(traj), out, cfg, traj.seed)

    frames = {f.minor_index: f for f in traj.frames}
    summary_moments = {}
    if len(frames) >= 2:
        for i in range(cfg.num_eigs):
            summary_moments[f'deriv_est_{i + 1}'] = moments([f.derivative_est[i] for f in frames.values()])
    write_summary_json(_output_path(cfg, '.summary.json'), TrajectorySummary(
        spec=spec.model_dump(mode='json'),
        seed=traj.seed,
        moments=summary_moments,
        ks_reports=[],
        config=_echo(cfg)
    ))
    return 0


def cmd_derivative_dist(cfg: RunConfig) -> int:
    """
    n·q_i samples for the lowest `num_eigs` eigenvectors and a KS test of each column
    against Γ(β/2, 2/β).
    """
    spec = BetaEnsembleSpec(n=cfg.n, beta=cfg.beta)
    stream = RngStream(master_seed=cfg.seed)
    samples = spectral_weight_samples(spec, stream, cfg.num_eigs, cfg.reps, cfg.threads)

    law = GammaParams.derivative_law(cfg.beta)
    reports = [
        ks_one_sample(samples[:, i], gamma_cdf(law.shape, law.scale), name=f'derivative_ks_i{i + 1}')
        for i in range(cfg.num_eigs)
    ]
    table = pd.DataFrame(samples, columns=[f'deriv_{i + 1}' for i in range(cfg.num_eigs)])
    _write_table(table, _output_path(cfg), cfg, stream.record())
    write_summary_json(_output_path(cfg, '.summary.json'), TrajectorySummary(
        spec=spec.model_dump(mode='json'),
        seed=stream.record(),
        moments={column: moments(table[column].to_numpy()) for column in table.columns},
        ks_reports=reports,
        config=_echo(cfg)
    ))
    return _exit_code(reports)


def cmd_sao(cfg: RunConfig) -> int:
    """
    SAO solves on one path over the boundary grid 0, dt, …, t_max: eigenvalues, slopes and
    difference quotients, plus the path itself for replay.
    """
    stream = RngStream(master_seed=cfg.seed)
    cells = int(math.ceil(cfg.L / cfg.h))
    if math.isinf(cfg.beta):
        path = zero_grid(cfg.h, cells)
    else:
        path = sample_brownian_grid(stream, cfg.h, cells)

    t_indices = sorted({int(round(t / cfg.h)) for t in np.arange(0.0, cfg.t_max + cfg.dt / 2, cfg.dt)})
    table = sao_table(path, t_indices, cfg.num_eigs, cfg.window, cfg.L, cfg.beta, threads=cfg.threads)

    out = _output_path(cfg)
    if cfg.format == 'csv':
        write_sao_csv(table, out, {**_echo(cfg), **{f'seed.{k}': v for k, v in stream.record().items()}})
    else:
        _write_table(table, out, cfg, stream.record())
    export_path_csv(path, _output_path(cfg, '.path.csv'))

    summary_moments = {}
    for j, rows in table.groupby('j'):
        if len(rows) >= 2:
            summary_moments[f'slope_sq_{j}'] = moments(rows['slope_sq'].to_numpy())
            summary_moments[f'rel_err_{j}'] = moments(rows['rel_err'].to_numpy())
    write_summary_json(_output_path(cfg, '.summary.json'), TrajectorySummary(
        spec={'mesh': cfg.h, 'right_end': cfg.L, 'beta': cfg.beta},
        seed=stream.record(),
        moments=summary_moments,
        ks_reports=[],
        config=_echo(cfg)
    ))
    return 0


def cmd_stationarity(cfg: RunConfig) -> int:
    """
    Two-sample KS between the lowest eigenvalue at t = 0 and at t* minus t*, on the
    matrix model or the SAO.
    """
    stream = RngStream(master_seed=cfg.seed)
    if cfg.model == 'matrix':
        spec = BetaEnsembleSpec(n=cfg.n, beta=cfg.beta)
        start, later = stationarity_samples(spec, stream, cfg.t_star, cfg.reps, cfg.threads)
        report = ks_two_sample(start, later, name=f'stationarity_t{cfg.t_star}')
        spec_record = spec.model_dump(mode='json')
        _write_table(pd.DataFrame({'start': start, 'shifted': later}), _output_path(cfg), cfg, stream.record())
        summary_moments = {'start': moments(start), 'shifted': moments(later)}
    else:
        cells = int(math.ceil((cfg.L + cfg.t_star) / cfg.h)) + 1
        if math.isinf(cfg.beta):
            paths = [zero_grid(cfg.h, cells) for _ in range(cfg.reps)]
        else:
            paths = sample_path_ensemble(stream, cfg.reps, cfg.h, cells)
        report = stationarity_shift_check(paths, cfg.t_star, cfg.L, cfg.beta, threads=cfg.threads)
        spec_record = {'mesh': cfg.h, 'length': cfg.L, 'beta': cfg.beta}
        summary_moments = {}

    write_summary_json(_output_path(cfg, '.summary.json'), TrajectorySummary(
        spec=spec_record,
        seed=stream.record(),
        moments=summary_moments,
        ks_reports=[report],
        config=_echo(cfg)
    ))
    return _exit_code([report])


def cmd_verify(cfg: RunConfig, criteria: Optional[List[int]] = None) -> int:
    """
    The acceptance suite; one JSON report listing every criterion and its TestReports.
    """
    report = run_verification(
        seed=cfg.seed,
        threads=cfg.threads,
        quick=cfg.quick,
        numbers=criteria,
        config=_echo(cfg)
    )
    path = Path(cfg.out_path) if cfg.out_path else Path(DEFAULT_OUTPUTS['verify'] + '.json')
    write_verification_json(report, path)
    return 0 if report.passed else 1


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse, validate, run one subcommand and return its exit code.
    """
    cfg, args = resolve_config(argv)
    logger.info(f'⚙️ Running `{cfg.subcommand}` with seed {cfg.seed}')
    try:
        if cfg.subcommand == 'trajectory':
            code = cmd_trajectory(cfg)
        elif cfg.subcommand == 'derivative-dist':
            code = cmd_derivative_dist(cfg)
        elif cfg.subcommand == 'sao':
            code = cmd_sao(cfg)
        elif cfg.subcommand == 'stationarity':
            code = cmd_stationarity(cfg)
        else:
            code = cmd_verify(cfg, getattr(args, 'criteria', None))
    except Exception as e:
        logger.error(f'❌ `{cfg.subcommand}` failed: {str(e)}')
        raise
    icon = '✅' if code == 0 else '❌'
    logger.info(f'{icon} Finished `{cfg.subcommand}` with exit code {code}')
    return code


if __name__ == "__main__":
    sys.exit(main())
