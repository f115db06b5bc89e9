"""Discrete episodic MDPs: a small generic table-driven MDP and the 5x5 Taxi gridworld."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Protocol, Sequence


class ContractViolation(ValueError):
    """Raised when a caller passes an index or field outside its documented range."""


class Transition(NamedTuple):
    next_state: int
    reward: float
    terminal: bool


class DiscreteMDP(Protocol):
    max_steps: int

    def num_states(self) -> int: ...

    def num_actions(self) -> int: ...

    def reset(self, rng: random.Random | int | None = None) -> int: ...

    def step(self, state: int, action: int) -> Transition: ...


def _as_rng(rng: random.Random | int | None) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(rng)


class TabularMDP:
    """Deterministic MDP given as an explicit table ``table[s][a] -> Transition``.

    Used for small fixtures (chains, two-state toys) in tests and examples.
    """

    def __init__(
        self,
        table: Sequence[Sequence[Transition]],
        start_states: Sequence[int] = (0,),
        max_steps: int = 200,
    ) -> None:
        if not table or not table[0]:
            raise ContractViolation("transition table must be non-empty")
        n_actions = len(table[0])
        for row in table:
            if len(row) != n_actions:
                raise ContractViolation("every state needs the same number of actions")
            for t in row:
                if not 0 <= t.next_state < len(table):
                    raise ContractViolation(f"successor {t.next_state} out of range")
        self._table = [list(row) for row in table]
        self._starts = list(start_states)
        self.max_steps = max_steps

    def num_states(self) -> int:
        return len(self._table)

    def num_actions(self) -> int:
        return len(self._table[0])

    def reset(self, rng: random.Random | int | None = None) -> int:
        rng = _as_rng(rng)
        return self._starts[rng.randrange(len(self._starts))]

    def step(self, state: int, action: int) -> Transition:
        if not 0 <= state < len(self._table):
            raise ContractViolation(f"state {state} out of range")
        row = self._table[state]
        if not 0 <= action < len(row):
            raise ContractViolation(f"action {action} out of range")
        return row[action]


def chain_mdp(length: int = 5, goal_reward: float = 20.0, step_reward: float = -1.0) -> TabularMDP:
    """Corridor of ``length`` states; action 1 moves right, action 0 moves left.

    Stepping right out of the last state ends the episode with ``goal_reward``.
    """
    table = []
    for s in range(length):
        left = Transition(max(s - 1, 0), step_reward, False)
        if s == length - 1:
            right = Transition(s, goal_reward, True)
        else:
            right = Transition(s + 1, step_reward, False)
        table.append([left, right])
    return TabularMDP(table, start_states=(0,), max_steps=200)


# Taxi ---------------------------------------------------------------------

SOUTH, NORTH, EAST, WEST, PICKUP, DROPOFF = range(6)
ACTION_NAMES = ("south", "north", "east", "west", "pickup", "dropoff")

TAXI_MAP = (
    "+---------+",
    "|R: | : :G|",
    "| : | : : |",
    "| : : : : |",
    "| | : | : |",
    "|Y| : |B: |",
    "+---------+",
)
# R, G, Y, B
LANDMARKS = ((0, 0), (0, 4), (4, 0), (4, 3))
IN_TAXI = 4
N_ROWS = N_COLS = 5


@dataclass(frozen=True)
class TaxiState:
    taxi_row: int
    taxi_col: int
    passenger_loc: int
    destination: int


def encode(ts: TaxiState) -> int:
    if not (0 <= ts.taxi_row < N_ROWS and 0 <= ts.taxi_col < N_COLS):
        raise ContractViolation(f"taxi position ({ts.taxi_row}, {ts.taxi_col}) off the grid")
    if not 0 <= ts.passenger_loc <= IN_TAXI:
        raise ContractViolation(f"passenger_loc {ts.passenger_loc} not in 0..4")
    if not 0 <= ts.destination < len(LANDMARKS):
        raise ContractViolation(f"destination {ts.destination} not in 0..3")
    return ((ts.taxi_row * N_COLS + ts.taxi_col) * 5 + ts.passenger_loc) * 4 + ts.destination


def decode(index: int) -> TaxiState:
    if not 0 <= index < 500:
        raise ContractViolation(f"state {index} not in [0, 500)")
    index, dest = divmod(index, 4)
    index, passenger = divmod(index, 5)
    row, col = divmod(index, N_COLS)
    return TaxiState(row, col, passenger, dest)


def _taxi_transition(ts: TaxiState, action: int) -> Transition:
    row, col, passenger, dest = ts.taxi_row, ts.taxi_col, ts.passenger_loc, ts.destination
    reward = -1.0
    terminal = False
    if action == SOUTH:
        row = min(row + 1, N_ROWS - 1)
    elif action == NORTH:
        row = max(row - 1, 0)
    elif action == EAST:
        # map column of the separator right of the taxi
        if TAXI_MAP[row + 1][2 * col + 2] == ":":
            col += 1
    elif action == WEST:
        if TAXI_MAP[row + 1][2 * col] == ":":
            col -= 1
    elif action == PICKUP:
        if passenger < IN_TAXI and (row, col) == LANDMARKS[passenger]:
            passenger = IN_TAXI
        else:
            reward = -10.0
    elif action == DROPOFF:
        if passenger == IN_TAXI and (row, col) == LANDMARKS[dest]:
            passenger = dest
            reward = 20.0
            terminal = True
        elif passenger == IN_TAXI and (row, col) in LANDMARKS:
            passenger = LANDMARKS.index((row, col))
        else:
            reward = -10.0
    return Transition(encode(TaxiState(row, col, passenger, dest)), reward, terminal)


class TaxiEnv:
    """Deterministic 5x5 Taxi: 500 states, 6 actions, -1 per step, -10 for an
    illegal pickup/drop-off, +20 for delivering the passenger.

    The full transition table is built once; ``step`` is a table lookup.
    """

    def __init__(self, max_steps: int = 200) -> None:
        self.max_steps = max_steps
        self._table = [
            [_taxi_transition(decode(s), a) for a in range(6)] for s in range(500)
        ]
        self.start_states = [
            s
            for s in range(500)
            if (ts := decode(s)).passenger_loc != IN_TAXI and ts.passenger_loc != ts.destination
        ]

    def num_states(self) -> int:
        return 500

    def num_actions(self) -> int:
        return 6

    def reset(self, rng: random.Random | int | None = None) -> int:
        """Draw a start state uniformly: passenger waiting at a landmark other than the destination."""
        rng = _as_rng(rng)
        return self.start_states[rng.randrange(len(self.start_states))]

    def step(self, state: int, action: int) -> Transition:
        if not 0 <= state < 500:
            raise ContractViolation(f"state {state} not in [0, 500)")
        if not 0 <= action < 6:
            raise ContractViolation(f"action {action} not in [0, 6)")
        return self._table[state][action]
