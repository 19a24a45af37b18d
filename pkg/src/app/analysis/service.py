"""
Ergodicity, regularity, limiting behavior and graph export of fitted chains.

The states of an order-k chain are its k-tuples; the successor of tuple
(a, ..., b) through note c is (..., b, c). All-zero rows (tuples never followed
by a note) are left out of the analysis and listed in the report.
"""

from collections.abc import Sequence
from fractions import Fraction

import networkx as nx
import numpy as np

from src import errors
from src import log
from src.app.corpus.types import NoteSequence
from src.app.model import service as model_service
from src.app.model.types import TransitionMatrix
from src.config import config

from . import types

__all__ = [
    "Error",
    "NotRegular",
    "NoConvergence",
    "SingularSystem",
    "is_closed",
    "is_ergodic",
    "is_regular",
    "limiting_matrix",
    "stationary_solve",
    "export_dot",
    "order_sweep",
    "chain_report",
]

LOG = log.get_logger(__name__)


class Error(errors.Error):
    """The analysis error."""

    exit_code = errors.EXIT_PRECONDITION


class NotRegular(Error):
    """Raised when an operation needs a regular chain."""

    code = "NOT_REGULAR"


class NoConvergence(Error):
    """Raised when the matrix powers do not settle within the power limit."""

    code = "NO_CONVERGENCE"


class SingularSystem(Error):
    """Raised when the balance equations have no unique solution."""

    code = "SINGULAR_SYSTEM"


def _successor(tpm: TransitionMatrix, row: int, col: int) -> int:
    return (row * tpm.alphabet.size + col) % tpm.n_rows


def states(tpm: TransitionMatrix) -> list[int]:
    """The analyzed rows: those with at least one successor."""
    return [int(r) for r in np.flatnonzero(tpm.observed)]


def state_matrix(tpm: TransitionMatrix) -> tuple[np.ndarray, list[int]]:
    """The float state-to-state matrix over the analyzed states."""
    rows = states(tpm)
    position = {r: i for i, r in enumerate(rows)}
    matrix = np.zeros((len(rows), len(rows)), dtype=np.float64)
    for i, r in enumerate(rows):
        for c in np.flatnonzero(tpm.numerators[r]):
            if (j := position.get(_successor(tpm, r, int(c)))) is not None:
                matrix[i, j] += tpm.array[r, c]
    return matrix, rows


def is_closed(tpm: TransitionMatrix) -> bool:
    """No analyzed state sends probability into a state without successors."""
    matrix, _ = state_matrix(tpm)
    return bool(np.allclose(matrix.sum(axis=1), 1.0))


def support_graph(tpm: TransitionMatrix) -> nx.DiGraph:
    """The directed support graph: an edge for every positive transition."""
    matrix, rows = state_matrix(tpm)
    graph = nx.DiGraph()
    graph.add_nodes_from(rows)
    for i, j in zip(*np.nonzero(matrix)):
        graph.add_edge(rows[i], rows[j])
    return graph


def is_ergodic(tpm: TransitionMatrix) -> bool:
    """Every analyzed state can reach every other one, not necessarily in one move."""
    graph = support_graph(tpm)
    return graph.number_of_nodes() > 0 and nx.is_strongly_connected(graph)


def is_regular(tpm: TransitionMatrix) -> tuple[bool, int | None]:
    """Find the smallest n with an entrywise positive n-th power of the support.

    The search stops at Wielandt's bound (n_states - 1)**2 + 1, past which no
    primitive pattern can first become positive.
    """
    matrix, rows = state_matrix(tpm)
    if not rows:
        return False, None
    support = (matrix > 0).astype(np.int64)
    power = support.copy()
    for n in range(1, (len(rows) - 1) ** 2 + 2):
        if power.all():
            return True, n
        power = ((power @ support) > 0).astype(np.int64)
    return False, None


def limiting_matrix(
    tpm: TransitionMatrix, tol: float | None = None, max_power: int | None = None
) -> types.LimitingResult:
    """Multiply A, A**2, A**3, ... until the powers settle into identical rows.

    The reported power is the first n with max|A**n - A**(n-1)| < tol and every
    column spread below tol; for n = 1 only the spread is checked.

    :raises :class:`NotRegular`
    :raises :class:`NoConvergence`
    """
    tol = tol if tol is not None else config.tolerance
    max_power = max_power if max_power is not None else config.max_power
    if not is_regular(tpm)[0]:
        raise NotRegular("The chain is not regular, its powers do not converge to rank one.")
    if not is_closed(tpm):
        raise NotRegular(
            "The analyzed states leak into states without successors, the powers decay to 0."
        )

    matrix, rows = state_matrix(tpm)
    power = matrix
    previous: np.ndarray | None = None
    for n in range(1, max_power + 1):
        spread = float((power.max(axis=0) - power.min(axis=0)).max())
        settled = previous is None or float(np.abs(power - previous).max()) < tol
        if settled and spread < tol:
            LOG.debug("Limiting matrix reached.", power=n, tol=tol)
            return types.LimitingResult(
                matrix=power,
                power=n,
                vector=power.mean(axis=0),
                states=[tpm.row_label(r) for r in rows],
            )
        previous, power = power, power @ matrix
    raise NoConvergence(f"The powers did not converge within {max_power} steps (tol={tol}).")


def stationary_solve(tpm: TransitionMatrix) -> np.ndarray:
    """Solve w A = w, sum(w) = 1 directly.

    The last balance equation is replaced by the normalization row.

    :raises :class:`SingularSystem` when the solution is not unique.
    """
    matrix, rows = state_matrix(tpm)
    n = len(rows)
    if not n:
        raise SingularSystem("The chain has no observed states.")
    if not is_closed(tpm):
        raise SingularSystem(
            "The analyzed states leak into states without successors, wA = w has no solution."
        )
    system = matrix.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    if np.linalg.matrix_rank(system) < n:
        raise SingularSystem("The balance equations are singular, the chain is reducible.")
    if not is_regular(tpm)[0]:
        LOG.warning("The chain is not regular, its powers do not converge to w.")
    return np.linalg.solve(system, rhs)


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(tpm: TransitionMatrix, name: str | None = None) -> str:
    """Render the state transition diagram in Graphviz DOT.

    Nodes come in row order, edges in (row, column) order; labels are exact
    probabilities.
    """
    name = name or f"{tpm.alphabet.id}_order{tpm.order}"
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;"]
    lines.extend(f"  {_quote(tpm.row_label(r))};" for r in range(tpm.n_rows))
    for r in range(tpm.n_rows):
        for c in np.flatnonzero(tpm.numerators[r]):
            p = Fraction(int(tpm.numerators[r, c]), int(tpm.denominators[r]))
            target = tpm.row_label(_successor(tpm, r, int(c)))
            lines.append(f"  {_quote(tpm.row_label(r))} -> {_quote(target)} [label=\"{p}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def order_sweep(
    corpus: Sequence[NoteSequence], k_max: int, max_rows: int | None = None
) -> types.OrderSweep:
    """Fit orders 1..k_max and report the sparsity and dead rows of each.

    :raises :class:`model_service.OrderTooLarge`
    """
    if k_max < 1:
        raise errors.UsageError(f"The maximal order must be at least 1, got {k_max}.")
    rows = []
    for k in range(1, k_max + 1):
        tpm = model_service.to_tpm(model_service.count_transitions(corpus, k, max_rows))
        rows.append(
            types.SweepRow(
                order=k,
                sparsity=float(model_service.sparsity(tpm)),
                dead_end_rows=model_service.dead_end_rows(tpm),
                rows=tpm.n_rows,
            )
        )
        LOG.debug("Swept order.", order=k, sparsity=rows[-1].sparsity)
    return types.OrderSweep(rows=rows)


def chain_report(tpm: TransitionMatrix, tol: float | None = None) -> types.ChainReport:
    """Collect ergodicity, regularity, the fixed vector and sparsity of a tpm."""
    tol = tol if tol is not None else config.tolerance
    rows = states(tpm)
    excluded = [tpm.row_label(int(r)) for r in np.flatnonzero(~tpm.observed)]
    if excluded:
        LOG.info("Excluded all-zero states from the analysis.", excluded=len(excluded))

    regular, regularity_power = is_regular(tpm)
    stationary = convergence_power = None
    if regular and not is_closed(tpm):
        LOG.warning("The analyzed states are not closed, no fixed vector.")
    elif regular:
        try:
            limit = limiting_matrix(tpm, tol)
        except NoConvergence as err:
            LOG.warning("No limiting matrix.", reason=str(err))
        else:
            stationary, convergence_power = limit.vector.tolist(), limit.power

    return types.ChainReport(
        order=tpm.order,
        states=[tpm.row_label(r) for r in rows],
        excluded_states=excluded,
        ergodic=is_ergodic(tpm),
        regular=regular,
        regularity_power=regularity_power,
        stationary=stationary,
        convergence_power=convergence_power,
        tolerance=tol,
        sparsity=float(model_service.sparsity(tpm)),
        dead_end_rows=model_service.dead_end_rows(tpm),
    )
