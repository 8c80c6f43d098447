import pathlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, List, Optional, OrderedDict, Union

import numpy as np
import xarray as xr
from dataclasses_json import dataclass_json

from forelpb import get_forelpb_version
from forelpb.analysis import (
    AnalysisReport,
    NotCyclic,
    boundary_cycle_comparison,
    check_welfare_theorem,
    equalizing_strategy,
    interior_nash,
    jacobian,
    kl_derivative_diagnostic,
    minimax_values,
    stability_classify,
    welfare_bound,
)
from forelpb.conditions import (
    ConditionReport,
    CooperationVerdict,
    NonGenericMatrix,
    certify_pb,
    dominance_profile,
    nearest_neighbor_cooperation,
)
from forelpb.demos import Demo, UnknownDemo, get_demo
from forelpb.dynamics import (
    X_COORDINATES,
    Z_COORDINATES,
    FlowSystem,
    NearestNeighborGame,
    binary_game_system,
    corner_pull,
    nearest_neighbor_system,
    replicator_field_x,
    x_to_z,
    z_to_x,
)
from forelpb.game import BinaryGame, BoundaryProfileError, payoff_vector
from forelpb.game_spec import GameSpecError, load_game_spec
from forelpb.limit_sets import ClassifierParams, classify_limit_set
from forelpb.linalg import eigenvalues
from forelpb.metadata import MetadataHelper, parse_attributes
from forelpb.misc_helper import brief_list, format_vector, random_interior
from forelpb.regularizer import Entropy, Regularizer, regularizers_for
from forelpb.solver import (
    COMPLETED,
    IntegratorConfig,
    Trajectory,
    integrate,
    running_state_average,
    time_average_payoffs,
)


class RunSpecError(ValueError):
    pass


@dataclass_json
@dataclass
class RunSpec:
    """
    One run: the game (spec file or demo), the initial condition, the integrator
    settings, and where outputs go. ``t_end`` and ``z_cap`` default to the
    demo's values, else to IntegratorConfig's.
    """

    game_spec: Optional[str] = None
    demo: Optional[str] = None
    regularizers: Optional[List[str]] = None
    x0: Optional[List[float]] = None
    z0: Optional[List[float]] = None
    random_interior: bool = False
    seed: Optional[int] = None
    coordinates: str = Z_COORDINATES
    method: str = "rk45"
    t_end: Optional[float] = None
    dt: float = 1e-2
    rtol: float = 1e-9
    atol: float = 1e-9
    max_step: float = 0.1
    stride: int = 1
    z_cap: Optional[float] = None
    classifier: ClassifierParams = field(default_factory=ClassifierParams)
    welfare_tol: float = 0.05
    kl_diagnostic: bool = True
    output_dir: str = "."
    output_prefix: str = "forelpb"
    svg: bool = False
    netcdf: bool = False
    global_attrs_uri: Optional[str] = None
    set_global_attrs: Optional[List[List[str]]] = None

    def __post_init__(self):
        if (self.game_spec is None) == (self.demo is None):
            raise RunSpecError("exactly one of a game spec file or a demo name is required")
        sources = sum(
            [self.x0 is not None, self.z0 is not None, bool(self.random_interior)]
        )
        if sources > 1:
            raise RunSpecError("at most one initial condition source may be given")
        if self.random_interior and self.seed is None:
            raise RunSpecError("a seed is required for random-interior initial conditions")
        if self.coordinates not in (X_COORDINATES, Z_COORDINATES):
            raise RunSpecError(f"unknown coordinates '{self.coordinates}'")


AnyGame = Union[BinaryGame, NearestNeighborGame]


@dataclass_json
@dataclass
class ConditionsSummary:
    report: ConditionReport
    dominance_profile: List[Optional[int]] = field(default_factory=list)
    cooperation: List[CooperationVerdict] = field(default_factory=list)


@dataclass_json
@dataclass
class NashSummary:
    game: str
    interior_nash: Optional[List[float]]
    equalizers: List[Optional[float]]
    minimax: List[Optional[float]]
    welfare_bound: Optional[float]
    dominance_profile: List[Optional[int]]
    notes: List[str] = field(default_factory=list)


class RunHelper:
    def __init__(
        self,
        log,  # : loguru.Logger,
        run_spec: RunSpec,
    ):
        self.log = log
        self.run_spec = rs = run_spec

        self.log.info(
            "Creating RunHelper:"
            + f"\n    game_spec:      {rs.game_spec}"
            + f"\n    demo:           {rs.demo}"
            + f"\n    regularizers:   {rs.regularizers}"
            + f"\n    x0:             {rs.x0}"
            + f"\n    z0:             {rs.z0}"
            + (f"\n    seed:           {rs.seed}" if rs.random_interior else "")
            + f"\n    coordinates:    {rs.coordinates}"
            + f"\n    method:         {rs.method}"
            + f"\n    t_end:          {rs.t_end}"
            + f"\n    output_dir:     {rs.output_dir}"
            + f"\n    output_prefix:  {rs.output_prefix}"
            + "\n"
        )

        self.demo: Optional[Demo] = None
        self.game: AnyGame
        self.regularizers: List[Regularizer]
        try:
            if rs.demo is not None:
                self.demo = get_demo(rs.demo)
                if self.demo.game is not None:
                    self.game = self.demo.game
                else:
                    assert self.demo.nn_game is not None
                    self.game = self.demo.nn_game
                names = rs.regularizers or ["entropy"]
                self.regularizers = regularizers_for(self.n_players, names)
            else:
                assert rs.game_spec is not None
                spec = load_game_spec(rs.game_spec)
                self.game = spec.to_game()
                if rs.regularizers:
                    spec.regularizers = list(rs.regularizers)
                self.regularizers = spec.get_regularizers()
        except (GameSpecError, UnknownDemo):
            raise
        except ValueError as e:
            raise RunSpecError(str(e)) from e

        pathlib.Path(rs.output_dir).mkdir(parents=True, exist_ok=True)

    @property
    def n_players(self) -> int:
        return self.game.n_players

    @property
    def game_name(self) -> str:
        if isinstance(self.game, BinaryGame):
            return self.game.name or "game"
        return self.demo.name if self.demo is not None else "nn-game"

    @property
    def output_base(self) -> str:
        return f"{self.run_spec.output_dir}/{self.run_spec.output_prefix}"

    def integrator_config(self) -> IntegratorConfig:
        rs = self.run_spec
        default = self.demo if self.demo is not None else IntegratorConfig()
        t_end = default.t_end if rs.t_end is None else rs.t_end
        z_cap = default.z_cap if rs.z_cap is None else rs.z_cap
        try:
            return IntegratorConfig(
                method=rs.method,
                t_end=t_end,
                dt=rs.dt,
                rtol=rs.rtol,
                atol=rs.atol,
                max_step=rs.max_step,
                stride=rs.stride,
                z_cap=z_cap,
            )
        except ValueError as e:
            raise RunSpecError(str(e)) from e

    def system(self) -> FlowSystem:
        if isinstance(self.game, NearestNeighborGame):
            return nearest_neighbor_system(self.game, label=self.game_name)
        self.game.require_one_predecessor()
        try:
            return binary_game_system(
                self.game, self.regularizers, self.run_spec.coordinates
            )
        except ValueError as e:
            raise RunSpecError(str(e)) from e

    def initial_x(self) -> np.ndarray:
        rs = self.run_spec
        if rs.random_interior:
            assert rs.seed is not None
            return random_interior(rs.seed, self.n_players)
        if rs.x0 is not None:
            x = np.array(rs.x0, dtype=float)
        elif rs.z0 is not None:
            x = z_to_x(self.regularizers, self._checked(rs.z0))
        elif self.demo is not None:
            x = np.array(self.demo.x0)
        else:
            raise RunSpecError("an initial condition is required for game spec files")
        x = self._checked(x)
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise RunSpecError(f"x0 must be in [0, 1]: {x}")
        return x

    def initial_state(self, system: FlowSystem) -> np.ndarray:
        rs = self.run_spec
        if system.coordinates == Z_COORDINATES:
            if rs.z0 is not None:
                return self._checked(rs.z0)
            try:
                return x_to_z(self.regularizers, self.initial_x())
            except ValueError as e:
                raise RunSpecError(f"initial condition: {e}") from e
        return self.initial_x()

    def _checked(self, v) -> np.ndarray:
        arr = np.array(v, dtype=float)
        if arr.shape != (self.n_players,) or not np.all(np.isfinite(arr)):
            raise RunSpecError(
                f"initial condition must have {self.n_players} finite entries: {v}"
            )
        return arr

    def simulate(self) -> Trajectory:
        system = self.system()
        state0 = self.initial_state(system)
        config = self.integrator_config()
        self.log.info(f"simulating {self.game_name} from {format_vector(state0)}")
        traj = integrate(self.log, system, state0, config)
        self.log.info(
            f"  {traj.n_samples} samples, termination={traj.termination.reason},"
            f" x(T)={brief_list([round(float(v), 6) for v in traj.x[-1]])}"
        )
        return traj

    def corner_pull(self):
        if isinstance(self.game, BinaryGame):
            game = self.game
            return lambda s: corner_pull(game, s)
        return None

    def conditions(self) -> ConditionsSummary:
        if isinstance(self.game, NearestNeighborGame):
            n = self.game.n_players
            report = ConditionReport(
                n_players=n,
                edges=[],
                one_predecessor_violations=list(range(n)),
                connected=True,
                certified=False,
                reasons=["nearest-neighbor game: every player has two neighbors"],
            )
            cooperation = [nearest_neighbor_cooperation(t) for t in self.game.tensors]
            return ConditionsSummary(report, [], cooperation)
        report = certify_pb(self.game)
        dominance: List[Optional[int]] = []
        if not report.one_predecessor_violations:
            dominance = dominance_profile(self.game)
        return ConditionsSummary(report, dominance)

    def nash(self) -> NashSummary:
        game = self._binary_game("nash")
        notes: List[str] = []
        nash = self._interior_nash(game, notes)
        equalizers: List[Optional[float]] = []
        for e in game.edges:
            try:
                equalizers.append(equalizing_strategy(e.matrix))
            except NonGenericMatrix:
                equalizers.append(None)
        minimax, bound = self._minimax(game, notes)
        return NashSummary(
            game=self.game_name,
            interior_nash=None if nash is None else [float(v) for v in nash],
            equalizers=equalizers,
            minimax=minimax,
            welfare_bound=bound,
            dominance_profile=dominance_profile(game),
            notes=notes,
        )

    def _binary_game(self, what: str) -> BinaryGame:
        if not isinstance(self.game, BinaryGame):
            raise RunSpecError(f"{what} needs a binary one-predecessor game")
        self.game.require_one_predecessor()
        return self.game

    def _interior_nash(self, game: BinaryGame, notes: List[str]) -> Optional[np.ndarray]:
        try:
            nash = interior_nash(game)
            if nash is None:
                notes.append("no interior Nash equilibrium: some edge has a dominant strategy")
            return nash
        except NotCyclic as e:
            notes.append(f"interior Nash not computed: {e}")
        except NonGenericMatrix as e:
            notes.append(f"interior Nash not computed: {e}")
        profile = dominance_profile(game)
        notes.append(f"pure-dominance propagation: {profile}")
        return None

    def _minimax(self, game: BinaryGame, notes: List[str]):
        try:
            return minimax_values(game), welfare_bound(game)
        except NonGenericMatrix as e:
            notes.append(f"minimax not computed: {e}")
            return [], None

    def analyze(self, traj: Optional[Trajectory] = None) -> AnalysisReport:
        traj = traj if traj is not None else self.simulate()
        report = AnalysisReport(game=self.game_name, n_players=self.n_players)
        report.termination = traj.termination.reason
        report.verdict = classify_limit_set(
            traj, self.run_spec.classifier, self.corner_pull()
        )
        report.averages = time_average_payoffs(traj)
        self.log.info(f"limit set verdict: {report.verdict.kind}")

        if self.demo is not None and self.demo.simulate_only:
            report.notes.append(
                f"{self.demo.name} is outside the certified class:"
                " equilibrium and welfare checks skipped"
            )
            return report

        if isinstance(self.game, NearestNeighborGame):
            verdicts = [nearest_neighbor_cooperation(t) for t in self.game.tensors]
            report.notes.append(
                "nearest-neighbor cooperation holds for all players: "
                + str(all(v.holds for v in verdicts))
            )
            return report

        game = self._binary_game("analyze")
        report.dominance_profile = dominance_profile(game)
        minimax, bound = self._minimax(game, report.notes)
        report.minimax = minimax
        report.welfare_bound = bound
        if bound is not None and traj.n_samples > 0:
            report.welfare = check_welfare_theorem(game, traj, self.run_spec.welfare_tol)

        nash = self._interior_nash(game, report.notes)
        if nash is not None:
            report.interior_nash = [float(v) for v in nash]
            report.nash_payoffs = [float(v) for v in payoff_vector(game, nash)]
            jac = jacobian(lambda x: replicator_field_x(game, x), nash)
            eigs = eigenvalues(jac)
            report.spectrum = [[v.real, v.imag] for v in eigs]
            report.stability = stability_classify(eigs)
            average = running_state_average(traj)[-1]
            report.state_average_distance = float(np.max(np.abs(average - nash)))
            if self.run_spec.kl_diagnostic and all(
                isinstance(r, Entropy) for r in self.regularizers
            ):
                try:
                    kl = kl_derivative_diagnostic(game, traj, nash)
                    report.kl_max_abs_residual = kl.max_abs_residual
                except BoundaryProfileError:
                    report.notes.append("KL diagnostic skipped: trajectory reaches the boundary")

        if self.demo is not None and self.demo.asym is not None:
            n, p = self.demo.asym
            report.boundary_cycle = boundary_cycle_comparison(n, p, report.averages.sw)
            if not report.boundary_cycle.within_tolerance:
                report.notes.append(
                    f"boundary-cycle average {report.boundary_cycle.measured:.4g}"
                    f" differs from {report.boundary_cycle.quoted:.4g} by more than 15%"
                )
        if traj.termination.reason != COMPLETED:
            report.notes.append(f"integration terminated: {traj.termination.reason}")
        return report

    def load_global_attributes(self) -> Optional[OrderedDict[str, Any]]:
        rs = self.run_spec
        if not rs.global_attrs_uri:
            self.log.info("No global attributes file given.")
            return None
        self.log.info(f"Loading global attributes from {rs.global_attrs_uri}")
        path = pathlib.Path(rs.global_attrs_uri)
        res = parse_attributes(path.read_text(encoding="UTF-8"), path.suffix)
        for k, v in rs.set_global_attrs or []:
            res[k] = v
        return res

    def trajectory_dataset(self, traj: Trajectory) -> xr.Dataset:
        ds = traj.to_dataset()
        md_helper = MetadataHelper(self.log, self.load_global_attributes())
        md_helper.set_some_global_attributes(
            {
                "game": self.game_name,
                "date_created": datetime.now(timezone.utc).strftime("%Y-%m-%d"),
            }
        )
        md_helper.decorate(ds, {"{{forelpb_version}}": get_forelpb_version()})
        return ds

    def write_outputs(
        self, traj: Trajectory, report: Optional[Any] = None
    ) -> List[str]:
        """
        Writes the trajectory CSV, and depending on the run spec the SVG plots and
        the NetCDF dataset; ``report`` (any dataclass_json object) goes to JSON.
        """
        base = self.output_base
        generated = []
        csv_filename = f"{base}.csv"
        write_trajectory_csv(self.log, traj, csv_filename)
        generated.append(csv_filename)

        if report is not None:
            json_filename = f"{base}.json"
            write_json(self.log, report.to_json(indent=2), json_filename)
            generated.append(json_filename)

        if self.run_spec.svg:
            # pylint: disable=import-outside-toplevel
            from forelpb.plotting import plot_projections, plot_running_averages

            svg = f"{base}_projections.svg"
            plot_projections(traj, svg, title=self.game_name)
            generated.append(svg)
            svg = f"{base}_averages.svg"
            plot_running_averages(traj, svg, title=self.game_name)
            generated.append(svg)

        if self.run_spec.netcdf:
            nc_filename = f"{base}.nc"
            if save_dataset_to_netcdf(self.log, self.trajectory_dataset(traj), nc_filename):
                generated.append(nc_filename)
        return generated


def write_trajectory_csv(
    log,  # : loguru.Logger,
    traj: Trajectory,
    filename: str,
):
    log.info(f"  - saving trajectory to: {filename}")
    traj.to_dataframe().to_csv(filename, index=False)


def write_json(
    log,  # : loguru.Logger,
    contents: str,
    filename: str,
):
    log.info(f"  - saving report to: {filename}")
    with open(filename, "w", encoding="UTF-8") as f:
        f.write(contents)
        f.write("\n")


def save_dataset_to_netcdf(
    log,  # : loguru.Logger,
    ds: xr.Dataset,
    filename: str,
) -> bool:
    log.info(f"  - saving dataset to: {filename}")
    try:
        ds.to_netcdf(
            filename,
            engine="h5netcdf",
            encoding={name: {"_FillValue": None} for name in ds.data_vars},
        )
        return True
    except Exception as e:  # pylint: disable=broad-exception-caught
        log.error(f"Unable to save {filename}: {e}")
        return False
