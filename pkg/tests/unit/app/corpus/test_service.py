import pathlib

import numpy as np
import pytest

from src import storage
from src.app.corpus import service
from src.app.corpus.types import Alphabet
from src.app.corpus.types import AlphabetFile
from src.app.corpus.types import NoteSequence
from src.config import DEFAULT_DATA_DIR


class TestParseSequence:
    def test_parse(self, alphabet: Alphabet) -> None:
        seq = service.parse_sequence("SRgM", alphabet)
        assert seq.notes == (0, 1, 2, 3)

    def test_whitespace_ignored(self, alphabet: Alphabet) -> None:
        assert service.parse_sequence(" S R\ng\tM \n", alphabet).symbols() == ["S", "R", "g", "M"]

    def test_empty_text(self, alphabet: Alphabet) -> None:
        assert len(service.parse_sequence("", alphabet)) == 0

    def test_unknown_symbol(self, alphabet: Alphabet) -> None:
        with pytest.raises(service.UnknownSymbol) as err:
            service.parse_sequence("SRgMX", alphabet)
        assert err.value.position == 4
        assert err.value.fragment == "X"
        assert err.value.code == "UNKNOWN_SYMBOL"

    def test_unknown_symbol_location(self, alphabet: Alphabet) -> None:
        with pytest.raises(service.UnknownSymbol) as err:
            service.parse_sequence("SRgM\nMgdS", alphabet)
        assert (err.value.position, err.value.line, err.value.column) == (7, 2, 3)
        assert "line 2, column 3" in str(err.value)

    def test_skip_unknown(self, alphabet: Alphabet) -> None:
        seq = service.parse_sequence("SMdgRS", alphabet, skip_unknown=True)
        assert seq.symbols() == ["S", "M", "g", "R", "S"]

    def test_multi_character_symbols(self) -> None:
        alphabet = Alphabet(symbols=("S", "Sa", "Re"))
        seq = service.parse_sequence("Sa Re S\nSaRe", alphabet)
        assert seq.symbols() == ["Sa", "Re", "S", "Sa", "Re"]


class TestParseCorpus:
    def test_blank_lines_separate_sequences(self, alphabet: Alphabet) -> None:
        corpus = service.parse_corpus("SRg\nMPD\n\n\nnS\n   \nDn\n", alphabet)
        assert [s.symbols() for s in corpus] == [
            ["S", "R", "g", "M", "P", "D"],
            ["n", "S"],
            ["D", "n"],
        ]

    def test_empty_corpus(self, alphabet: Alphabet) -> None:
        with pytest.raises(service.EmptyCorpus):
            service.parse_corpus("\n \n\n", alphabet)

    def test_unknown_symbol_position_is_absolute(self, alphabet: Alphabet) -> None:
        with pytest.raises(service.UnknownSymbol) as err:
            service.parse_corpus("SR\n\nSX", alphabet)
        assert (err.value.position, err.value.line, err.value.column) == (5, 3, 2)

    def test_bundled_corpus(self, corpus: list[NoteSequence]) -> None:
        assert len(corpus) == 1
        assert len(corpus[0]) == 240
        assert corpus[0].symbols()[:2] == ["S", "n"]
        assert corpus[0].symbols()[-2:] == ["D", "S"]

    @pytest.mark.parametrize(
        ("name", "stray"),
        [
            ("order1_example1.txt", 0),
            ("order1_example2.txt", 1),
            ("order2_example1.txt", 0),
            ("order2_example2.txt", 2),
        ],
    )
    def test_printed_examples(self, alphabet: Alphabet, name: str, stray: int) -> None:
        """The printed example outputs hold a few stray lowercase symbols."""
        text = (DEFAULT_DATA_DIR / "examples" / name).read_text()
        notes = sum(not c.isspace() for c in text)
        if stray:
            with pytest.raises(service.UnknownSymbol):
                service.parse_corpus(text, alphabet)
        corpus = service.parse_corpus(text, alphabet, skip_unknown=True)
        assert sum(len(s) for s in corpus) == notes - stray


class TestFormatSequence:
    def test_round_trip(self, alphabet: Alphabet) -> None:
        text = "SnDMDnDMDnSMgRS"
        assert service.format_sequence(service.parse_sequence(text, alphabet)) == text

    def test_wrap(self, alphabet: Alphabet) -> None:
        seq = service.parse_sequence("SRgMPDn" * 3, alphabet)
        assert service.format_sequence(seq, width=8).split("\n") == [
            "SRgMPDnS",
            "RgMPDnSR",
            "gMPDn",
        ]

    def test_multi_character_symbols(self) -> None:
        alphabet = Alphabet(symbols=("Sa", "Re"))
        seq = service.parse_sequence("SaReSa", alphabet)
        assert service.format_sequence(seq) == "Sa Re Sa"


class TestPitchOf:
    @pytest.mark.parametrize(
        ("symbol", "shift", "pitch"), [("S", 0, 0), ("M", -1, -7), ("g", 1, 15), ("n", 0, 10)]
    )
    def test_published_values(
        self, bageshree: AlphabetFile, symbol: str, shift: int, pitch: int
    ) -> None:
        note = bageshree.alphabet.index(symbol)
        assert service.pitch_of(note, shift, bageshree.pitch_table) == pitch

    @pytest.mark.parametrize(("a", "b"), [(0, 1), (-1, 2), (1, -1), (3, -5), (-2, 0)])
    def test_octave_shift_is_additive(self, bageshree: AlphabetFile, a: int, b: int) -> None:
        table = bageshree.pitch_table
        for note in range(bageshree.alphabet.size):
            assert service.pitch_of(note, a + b, table) == service.pitch_of(note, a, table) + 12 * b


class TestPitchTrack:
    def test_nearest_octave(self, bageshree: AlphabetFile) -> None:
        seq = service.parse_sequence("DnS", bageshree.alphabet)
        assert service.to_pitch_track(seq, bageshree.pitch_table) == [9, 10, 12]

    def test_anchor(self, bageshree: AlphabetFile) -> None:
        seq = service.parse_sequence("DnS", bageshree.alphabet)
        assert service.to_pitch_track(seq, bageshree.pitch_table, anchor=0) == [-3, -2, 0]

    def test_tonic_reference(self, bageshree: AlphabetFile) -> None:
        seq = service.parse_sequence("DnS", bageshree.alphabet)
        assert service.to_pitch_track(seq, bageshree.pitch_table, 60) == [69, 70, 72]

    def test_shortest_steps(self, bageshree: AlphabetFile) -> None:
        """Every step is the shortest the three octaves allow, at most 6 when one fits."""
        table = bageshree.pitch_table
        notes = np.random.default_rng(17).integers(0, bageshree.alphabet.size, size=2000)
        seq = NoteSequence(alphabet=bageshree.alphabet, notes=tuple(int(n) for n in notes))
        track = service.to_pitch_track(seq, table)
        assert len(track) == len(seq)
        for previous, note, pitch in zip(track, seq.notes[1:], track[1:]):
            shortest = min(abs(service.pitch_of(note, s, table) - previous) for s in (-1, 0, 1))
            assert abs(pitch - previous) == shortest
            if shortest <= 6:
                assert abs(pitch - previous) <= 6

    def test_tie_prefers_middle_octave(self) -> None:
        alphabet = Alphabet(symbols=("S", "T"))
        table = AlphabetFile(symbols=["S", "T"], offsets={"S": 0, "T": 6}).pitch_table
        seq = service.parse_sequence("ST", alphabet)
        assert service.to_pitch_track(seq, table) == [0, 6]

    @pytest.mark.parametrize(
        ("notes", "anchor", "pitches"),
        [
            (
                "RSDnSMSnDMDnDMnDMDnSMgRSRSnDMDS",
                0,
                [2, 0, -3, -2, 0, 5, 0, -2, -3, -7, -3, -2, -3, -7, -2, -3,
                 -7, -3, -2, 0, 5, 3, 2, 0, 2, 0, -2, -3, -7, -3, 0],
            ),
            (
                "nSnDMPDMgRSMgMDnSRSMgRSMgRSnSRn",
                12,
                [10, 12, 10, 9, 5, 7, 9, 5, 3, 2, 0, 5, 3, 5, 9, 10,
                 12, 14, 12, 17, 15, 14, 12, 17, 15, 14, 12, 10, 12, 14, 10],
            ),
            (
                "nDMDnDSDnSDnDSnSRnSnDMPDMgRSnDS",
                12,
                [10, 9, 5, 9, 10, 9, 12, 9, 10, 12, 9, 10, 9, 12, 10, 12,
                 14, 10, 12, 10, 9, 5, 7, 9, 5, 3, 2, 0, -2, -3, 0],
            ),
        ],
    )  # fmt: skip
    def test_published_fragments(
        self, bageshree: AlphabetFile, notes: str, anchor: int, pitches: list[int]
    ) -> None:
        seq = service.parse_sequence(notes, bageshree.alphabet)
        assert service.to_pitch_track(seq, bageshree.pitch_table, anchor=anchor) == pitches

    def test_empty_sequence(self, bageshree: AlphabetFile) -> None:
        with pytest.raises(service.EmptySequence):
            service.to_pitch_track(NoteSequence(alphabet=bageshree.alphabet), bageshree.pitch_table)


class TestLoadAlphabet:
    def test_invalid_json(self, tmp_path: pathlib.Path) -> None:
        path = tmp_path / "alphabet.json"
        path.write_text("{")
        with pytest.raises(service.InvalidAlphabet):
            service.load_alphabet(str(path))

    def test_invalid_definition(self, tmp_path: pathlib.Path) -> None:
        path = tmp_path / "alphabet.json"
        path.write_text('{"symbols": ["S", "R"], "offsets": {"S": 0}}')
        with pytest.raises(service.InvalidAlphabet, match="Offsets do not match"):
            service.load_alphabet(str(path))

    def test_missing_file(self, tmp_path: pathlib.Path) -> None:
        with pytest.raises(storage.NotFound):
            service.load_alphabet(str(tmp_path / "missing.json"))
