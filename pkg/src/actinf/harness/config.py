"""Experiment configuration and the command-line surface.

Two run subcommands share one flag set: ``paths`` trains action-unaware
agents and ``plans`` trains action-aware ones. A third subcommand,
``charts``, re-renders figures from a finished run directory.
"""

import argparse
from dataclasses import asdict, dataclass, field

from ..action_selection import SELECTION_MODES
from ..environment import LAYOUT_NAMES, NUM_ACTIONS

AGENT_KINDS = ("unaware", "aware")


@dataclass
class Config:
    exp_name: str = "aif_paths"
    env_layout: str = "tmaze4"
    num_runs: int = 10
    num_episodes: int = 100
    num_steps: int = 4
    inf_steps: int = 10
    num_policies: int = 64
    action_selection: str = "kd"
    learn_B: bool = True
    learn_A: bool = False
    pref_loc: str = "all_goal"
    pref_precision: float = 4.0
    agent_kind: str = "unaware"
    seed: int = 1
    out_dir: str = "results"

    def __post_init__(self):
        if self.env_layout not in LAYOUT_NAMES:
            raise ValueError(f"--env_layout must be one of {LAYOUT_NAMES}")
        if self.num_steps < 2:
            raise ValueError("--num_steps must be at least 2 (one action, one arrival)")
        max_policies = NUM_ACTIONS ** (self.num_steps - 1)
        if not 1 <= self.num_policies <= max_policies:
            raise ValueError(
                f"--num_policies must be in 1..{max_policies} for --num_steps {self.num_steps}"
            )
        if self.action_selection not in SELECTION_MODES:
            raise ValueError(f"--action_selection must be one of {SELECTION_MODES}")
        if self.agent_kind not in AGENT_KINDS:
            raise ValueError(f"agent kind must be one of {AGENT_KINDS}")
        if self.pref_loc != "all_goal":
            raise ValueError("--pref_loc currently supports only 'all_goal'")
        for name in ("num_runs", "num_episodes", "inf_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name} must be positive")

    @property
    def horizon(self) -> int:
        return self.num_steps - 1

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        return cls(**data)


@dataclass
class ChartsRequest:
    run_dir: str
    policies: list[int] | None = field(default=None)


def _add_run_flags(parser: argparse.ArgumentParser, exp_name: str) -> None:
    parser.add_argument("--exp_name", default=exp_name)
    parser.add_argument("--gym_id", default="gridworld-v1", help="environment id (informational)")
    parser.add_argument("--env_layout", default="tmaze4", choices=LAYOUT_NAMES)
    parser.add_argument("--num_runs", type=int, default=10)
    parser.add_argument("--num_episodes", type=int, default=100)
    parser.add_argument("--num_steps", type=int, default=4)
    parser.add_argument("--inf_steps", type=int, default=10)
    parser.add_argument("--num_policies", type=int, default=64)
    parser.add_argument("--action_selection", default="kd", choices=SELECTION_MODES)
    parser.add_argument("-lB", "--learn_B", action="store_true")
    parser.add_argument("-lA", "--learn_A", action="store_true")
    parser.add_argument("--pref_loc", default="all_goal")
    parser.add_argument("--pref_precision", type=float, default=4.0)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out_dir", default="results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actinf",
        description="Train active inference agents on grid layouts and render the result figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    paths = sub.add_parser("paths", help="train action-unaware agents")
    _add_run_flags(paths, "aif_paths")
    plans = sub.add_parser("plans", help="train action-aware agents")
    _add_run_flags(plans, "aif_plans")
    charts = sub.add_parser("charts", help="render figures from a finished run directory")
    charts.add_argument("run_dir")
    charts.add_argument(
        "--policies",
        type=int,
        nargs="*",
        default=None,
        help="policy indices to draw; pass with no values for aggregate charts only",
    )
    return parser


def parse_cli(argv=None):
    """Parse arguments into ('paths'|'plans', Config) or ('charts', ChartsRequest)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "charts":
        return "charts", ChartsRequest(run_dir=args.run_dir, policies=args.policies)
    try:
        config = Config(
            exp_name=args.exp_name,
            env_layout=args.env_layout,
            num_runs=args.num_runs,
            num_episodes=args.num_episodes,
            num_steps=args.num_steps,
            inf_steps=args.inf_steps,
            num_policies=args.num_policies,
            action_selection=args.action_selection,
            learn_B=args.learn_B,
            learn_A=args.learn_A,
            pref_loc=args.pref_loc,
            pref_precision=args.pref_precision,
            agent_kind="unaware" if args.command == "paths" else "aware",
            seed=args.seed,
            out_dir=args.out_dir,
        )
    except ValueError as err:
        parser.error(str(err))
    return args.command, config
