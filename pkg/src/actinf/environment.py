"""Grid-world generative process: layouts, ground-truth dynamics, stepping.

Two deterministic layouts are built in. ``tmaze4`` is a five-tile T shape
(tiles 0, 1, 2 across the top, 3 below the junction, 4 at the bottom) solved
in three moves from the start at tile 4 to the goal in the left arm, tile 0.
``gridw9`` is a 3x3 room in row-major order, start top-left (0), goal
bottom-right (8). Actions are indexed 0 = right, 1 = down, 2 = left,
3 = up; a move into a wall leaves the agent in place.
"""

from dataclasses import dataclass

import numpy as np

RIGHT, DOWN, LEFT, UP = 0, 1, 2, 3
NUM_ACTIONS = 4
ACTION_NAMES = ("right", "down", "left", "up")

LAYOUT_NAMES = ("tmaze4", "gridw9")


@dataclass(frozen=True)
class Layout:
    """Static description of a grid: tile count, per-action successors, endpoints."""

    name: str
    num_tiles: int
    adjacency: np.ndarray  # (num_tiles, NUM_ACTIONS) -> successor tile
    start_tile: int
    goal_tile: int


@dataclass(frozen=True)
class GroundTruthMaps:
    """True dynamics as stochastic tables: one transition matrix per action
    (column-stochastic, column = current tile) plus the emission matrix."""

    transition_tensor: np.ndarray  # (NUM_ACTIONS, m, m)
    emission_matrix: np.ndarray  # (n, m)


def _tmaze4_adjacency() -> np.ndarray:
    adj = np.arange(5)[:, None].repeat(NUM_ACTIONS, axis=1)
    adj[0, RIGHT] = 1
    adj[1, RIGHT] = 2
    adj[1, DOWN] = 3
    adj[1, LEFT] = 0
    adj[2, LEFT] = 1
    adj[3, DOWN] = 4
    adj[3, UP] = 1
    adj[4, UP] = 3
    return adj


def _gridw9_adjacency() -> np.ndarray:
    adj = np.zeros((9, NUM_ACTIONS), dtype=int)
    for tile in range(9):
        row, col = divmod(tile, 3)
        adj[tile, RIGHT] = tile + 1 if col < 2 else tile
        adj[tile, DOWN] = tile + 3 if row < 2 else tile
        adj[tile, LEFT] = tile - 1 if col > 0 else tile
        adj[tile, UP] = tile - 3 if row > 0 else tile
    return adj


def build_layout(name: str) -> tuple[Layout, GroundTruthMaps]:
    """Construct a named layout and the one-hot dynamics tables it induces.

    The emission matrix is the identity pattern: observing a tile reveals it.
    """
    if name == "tmaze4":
        layout = Layout("tmaze4", 5, _tmaze4_adjacency(), start_tile=4, goal_tile=0)
    elif name == "gridw9":
        layout = Layout("gridw9", 9, _gridw9_adjacency(), start_tile=0, goal_tile=8)
    else:
        raise ValueError(f"unknown layout {name!r}; valid layouts: {', '.join(LAYOUT_NAMES)}")

    m = layout.num_tiles
    transition = np.zeros((NUM_ACTIONS, m, m))
    for action in range(NUM_ACTIONS):
        for tile in range(m):
            transition[action, layout.adjacency[tile, action], tile] = 1.0
    emission = np.eye(m)
    return layout, GroundTruthMaps(transition, emission)


class GridEnv:
    """Episodic driver for a layout: reset, then step at most T - 1 times.

    Tiles and observations are sampled from the ground-truth tables, which for
    the built-in layouts are one-hot, so traces are pure functions of
    (layout, seed, action sequence).
    """

    def __init__(self, layout: Layout, maps: GroundTruthMaps, episode_length: int):
        self.layout = layout
        self.maps = maps
        self.episode_length = episode_length
        self.current_tile = layout.start_tile
        self.step_index = 0  # 0 means "reset not called yet"
        self._rng = np.random.default_rng(0)

    def reset(self, seed: int | None = None) -> tuple[int, int]:
        """Start a new episode; returns (tile, observation) at step 1."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self.current_tile = self.layout.start_tile
        self.step_index = 1
        return self.current_tile, self._emit()

    def step(self, action: int) -> tuple[int, int, bool]:
        """Apply one action; returns (tile, observation, done)."""
        if self.step_index < 1:
            raise RuntimeError("step() called before reset()")
        if self.step_index >= self.episode_length:
            raise RuntimeError("episode already finished; call reset()")
        if not 0 <= action < NUM_ACTIONS:
            raise ValueError(f"invalid action index {action}")
        column = self.maps.transition_tensor[action, :, self.current_tile]
        self.current_tile = int(self._rng.choice(column.size, p=column))
        self.step_index += 1
        done = self.step_index == self.episode_length
        return self.current_tile, self._emit(), done

    def _emit(self) -> int:
        column = self.maps.emission_matrix[:, self.current_tile]
        return int(self._rng.choice(column.size, p=column))


def rollout_final_tile(layout: Layout, actions) -> int:
    """Final tile reached from the start after applying an action sequence."""
    tile = layout.start_tile
    for action in actions:
        tile = layout.adjacency[tile, action]
    return int(tile)


def goal_reaching_policies(layout: Layout, policies: np.ndarray) -> np.ndarray:
    """Indices of policies whose rollout ends on the goal tile."""
    hits = [
        k for k in range(policies.shape[0])
        if rollout_final_tile(layout, policies[k]) == layout.goal_tile
    ]
    return np.asarray(hits, dtype=int)
