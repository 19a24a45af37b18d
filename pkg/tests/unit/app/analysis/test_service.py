import numpy as np
import pydantic
import pytest

from src import errors
from src.app.analysis import service
from src.app.analysis import types
from src.app.corpus import service as corpus_service
from src.app.corpus.types import Alphabet
from src.app.corpus.types import NoteSequence
from src.app.model import service as model_service
from src.app.model.types import CountMatrix
from src.app.model.types import TransitionMatrix

W = np.array([46, 17, 20, 45, 5, 58, 48]) / 239
"""The fixed vector of the Bageshree order-1 chain: the relative row totals."""


def from_counts(counts: np.ndarray) -> TransitionMatrix:
    symbols = tuple("SRgMPDn"[: counts.shape[0]])
    alphabet = Alphabet(symbols=symbols)
    return model_service.to_tpm(CountMatrix(alphabet=alphabet, order=1, counts=counts))


def from_corpus(text: str, symbols: tuple[str, ...], order: int = 1) -> TransitionMatrix:
    corpus = corpus_service.parse_corpus(text, Alphabet(symbols=symbols))
    return model_service.to_tpm(model_service.count_transitions(corpus, order))


def brute_force_regularity(pattern: np.ndarray) -> int | None:
    n = pattern.shape[0]
    power = pattern.astype(np.float64)
    for k in range(1, (n - 1) ** 2 + 2):
        if (power > 0).all():
            return k
        power = power @ pattern
    return None


class TestErgodicity:
    def test_order_one(self, tpm1: TransitionMatrix) -> None:
        assert service.is_ergodic(tpm1)
        assert service.is_regular(tpm1)[0]

    def test_pa_only_leads_to_dha(self, tpm1: TransitionMatrix) -> None:
        p, d = tpm1.alphabet.index("P"), tpm1.alphabet.index("D")
        assert [c for c in range(7) if tpm1.numerators[p, c]] == [d]
        assert list(service.support_graph(tpm1).successors(p)) == [d]

    def test_periodic_chain(self) -> None:
        tpm = from_corpus("SRSRS", ("S", "R"))
        assert service.is_ergodic(tpm)
        assert service.is_regular(tpm) == (False, None)

    def test_reducible_chain(self) -> None:
        tpm = from_corpus("SRS\n\ngMg", ("S", "R", "g", "M"))
        assert not service.is_ergodic(tpm)
        assert service.is_regular(tpm) == (False, None)

    def test_closed(self, tpm1: TransitionMatrix, tpm2: TransitionMatrix) -> None:
        assert service.is_closed(tpm1)
        assert service.is_closed(tpm2)

    def test_regularity_ignores_values(self) -> None:
        """Only the support pattern decides regularity."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            pattern = (rng.random((4, 4)) < 0.4).astype(np.int64)
            pattern[np.arange(4), rng.integers(0, 4, size=4)] = 1
            small = from_counts(pattern * rng.integers(1, 10, size=(4, 4)))
            large = from_counts(pattern * rng.integers(10, 1000, size=(4, 4)))
            assert service.is_regular(small) == service.is_regular(large)

    def test_order_two_states(self, tpm2: TransitionMatrix) -> None:
        assert len(service.states(tpm2)) == 26
        matrix, rows = service.state_matrix(tpm2)
        assert matrix.shape == (26, 26)
        assert np.allclose(matrix.sum(axis=1), 1.0)

    def test_order_two_successor(self, tpm2: TransitionMatrix) -> None:
        """DS followed by n leads to the state Sn."""
        a = tpm2.alphabet
        ds, sn = a.row_index([a.index("D"), a.index("S")]), a.row_index([a.index("S"), a.index("n")])
        assert service.support_graph(tpm2).has_edge(ds, sn)

    def test_regularity_oracle(self) -> None:
        """Agree with float matrix powering on random 4-state support patterns."""
        rng = np.random.default_rng(7)
        for _ in range(100):
            pattern = (rng.random((4, 4)) < 0.4).astype(np.int64)
            pattern[np.arange(4), rng.integers(0, 4, size=4)] = 1
            expected = brute_force_regularity(pattern)
            assert service.is_regular(from_counts(pattern)) == (expected is not None, expected)


class TestLimitingMatrix:
    # The order-1 tpm is rebuilt from the order-2 counts. It settles at power 24 for
    # tol 1e-6; the published 28th power is reached at 5e-8.
    @pytest.mark.parametrize(("tol", "power"), [(1e-6, 24), (5e-8, 28)])
    def test_convergence_power(self, tpm1: TransitionMatrix, tol: float, power: int) -> None:
        result = service.limiting_matrix(tpm1, tol)
        assert result.power == power
        assert np.abs(result.vector - W).max() < 5e-6
        assert result.states == list(tpm1.alphabet.symbols)

    def test_rows_identical(self, tpm1: TransitionMatrix) -> None:
        result = service.limiting_matrix(tpm1, 1e-10)
        assert np.abs(result.matrix - result.matrix[0]).max() < 1e-10
        assert result.vector.sum() == pytest.approx(1.0)

    def test_agrees_with_direct_solve(self, tpm1: TransitionMatrix) -> None:
        limit = service.limiting_matrix(tpm1, 1e-12)
        assert np.abs(limit.vector - service.stationary_solve(tpm1)).max() < 1e-9

    def test_not_regular(self) -> None:
        with pytest.raises(service.NotRegular) as err:
            service.limiting_matrix(from_corpus("SRSRS", ("S", "R")))
        assert err.value.exit_code == errors.EXIT_PRECONDITION

    def test_leaking_states(self) -> None:
        """S leads into g, which has no successors, so the powers decay to 0."""
        tpm = from_corpus("SRSRSSRSg", ("S", "R", "g"))
        assert service.is_regular(tpm) == (True, 2)
        assert not service.is_closed(tpm)
        with pytest.raises(service.NotRegular, match="leak"):
            service.limiting_matrix(tpm, 1e-6)

    def test_no_convergence(self, tpm1: TransitionMatrix) -> None:
        with pytest.raises(service.NoConvergence):
            service.limiting_matrix(tpm1, 1e-6, max_power=5)

    def test_oracle(self) -> None:
        """Agree with the direct solve on random regular 5-state chains."""
        rng = np.random.default_rng(11)
        for _ in range(50):
            tpm = from_counts(rng.integers(1, 10, size=(5, 5)))
            limit = service.limiting_matrix(tpm, 1e-12)
            assert np.abs(limit.vector - service.stationary_solve(tpm)).max() < 1e-7


class TestStationarySolve:
    def test_order_one(self, tpm1: TransitionMatrix) -> None:
        w = service.stationary_solve(tpm1)
        assert np.abs(w - W).max() < 1e-12
        assert np.abs(w @ service.state_matrix(tpm1)[0] - w).max() < 1e-12

    def test_periodic_chain(self) -> None:
        w = service.stationary_solve(from_corpus("SRSRS", ("S", "R")))
        assert w.tolist() == pytest.approx([0.5, 0.5])

    def test_reducible_chain(self) -> None:
        with pytest.raises(service.SingularSystem):
            service.stationary_solve(from_corpus("SRS\n\ngMg", ("S", "R", "g", "M")))

    def test_leaking_states(self) -> None:
        with pytest.raises(service.SingularSystem, match="leak"):
            service.stationary_solve(from_corpus("SRSRSSRSg", ("S", "R", "g")))


class TestExportDot:
    def test_small_chain(self) -> None:
        tpm = from_corpus("SRSRS", ("S", "R"))
        assert service.export_dot(tpm).splitlines() == [
            'digraph "custom_order1" {',
            "  rankdir=LR;",
            '  "S";',
            '  "R";',
            '  "S" -> "R" [label="1"];',
            '  "R" -> "S" [label="1"];',
            "}",
        ]

    def test_order_two(self, tpm2: TransitionMatrix) -> None:
        dot = service.export_dot(tpm2)
        assert '"DS" -> "Sn" [label="4/9"];' in dot
        assert '"nD" -> "DM" [label="3/5"];' in dot
        assert dot.count(" -> ") == int((tpm2.numerators > 0).sum())
        assert service.export_dot(tpm2) == dot


class TestOrderSweep:
    def test_bageshree(self, corpus: list[NoteSequence]) -> None:
        sweep = service.order_sweep(corpus, 3)
        assert [r.order for r in sweep.rows] == [1, 2, 3]
        assert [r.rows for r in sweep.rows] == [7, 49, 343]
        assert sweep.rows[1].dead_end_rows == 23
        assert sweep.rows[1].sparsity > 0.4
        assert sweep.sparsity_monotonic

    def test_not_monotonic(self) -> None:
        sweep = types.OrderSweep(
            rows=[
                types.SweepRow(order=1, sparsity=0.5, dead_end_rows=0, rows=7),
                types.SweepRow(order=2, sparsity=0.4, dead_end_rows=0, rows=49),
            ]
        )
        assert not sweep.sparsity_monotonic

    def test_max_order_below_one(self, corpus: list[NoteSequence]) -> None:
        with pytest.raises(errors.UsageError):
            service.order_sweep(corpus, 0)


class TestChainReport:
    def test_order_one(self, tpm1: TransitionMatrix) -> None:
        report = service.chain_report(tpm1, 1e-6)
        assert report.ergodic and report.regular
        assert report.excluded_states == []
        assert report.convergence_power == 24
        assert report.stationary is not None
        assert np.abs(np.array(report.stationary) - W).max() < 5e-6
        assert report.dead_end_rows == 0

    def test_order_two(self, tpm2: TransitionMatrix) -> None:
        report = service.chain_report(tpm2)
        assert len(report.states) == 26
        assert len(report.excluded_states) == 23
        assert "PS" in report.excluded_states
        assert report.sparsity > 0.4
        assert report.dead_end_rows == 23

    def test_periodic_chain(self) -> None:
        report = service.chain_report(from_corpus("SRSRS", ("S", "R")))
        assert report.ergodic
        assert not report.regular
        assert report.stationary is None

    def test_leaking_states(self) -> None:
        """S also leads to the dead state g, so no fixed vector over S and R exists."""
        report = service.chain_report(from_corpus("SRSRSSRSg", ("S", "R", "g")))
        assert report.excluded_states == ["g"]
        assert report.stationary is None

    def test_regular_stationary_is_positive(self) -> None:
        with pytest.raises(pydantic.ValidationError, match="positive"):
            types.ChainReport(
                order=1,
                states=["S", "R"],
                ergodic=True,
                regular=True,
                stationary=[1.0, 0.0],
                tolerance=1e-6,
                sparsity=0.0,
                dead_end_rows=0,
            )

    def test_regular_implies_ergodic(self) -> None:
        with pytest.raises(pydantic.ValidationError, match="ergodic"):
            types.ChainReport(
                order=1,
                states=["S"],
                ergodic=False,
                regular=True,
                tolerance=1e-6,
                sparsity=0.0,
                dead_end_rows=0,
            )
