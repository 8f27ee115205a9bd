from __future__ import annotations

from itertools import combinations

import pytest

from chordblocks.blocks import (
    DEGREES,
    BlockSymbol,
    InvalidMortise,
    InvalidTenon,
    MortiseProfile,
    Shape,
    SymbolArrangement,
    TenonProfile,
    block_from_record,
    block_to_record,
    can_connect,
    compatibility_matrix,
    make_block,
    successor_table,
    symbol_for,
)
from chordblocks.theory import HarmonicFunction, ScaleDegree, functions_of

T = HarmonicFunction.TONIC
S = HarmonicFunction.SUBDOMINANT
D = HarmonicFunction.DOMINANT

SQ, TR, CI = Shape.SQUARE, Shape.TRIANGLE, Shape.CIRCLE


class TestSymbols:
    @pytest.mark.parametrize(
        "degree,expected",
        [
            (ScaleDegree.I, BlockSymbol.single(SQ)),
            (ScaleDegree.ii, BlockSymbol.doubled(CI)),
            (ScaleDegree.iii, BlockSymbol.overlap(SQ, TR)),
            (ScaleDegree.IV, BlockSymbol.single(CI)),
            (ScaleDegree.V, BlockSymbol.single(TR)),
            (ScaleDegree.vi, BlockSymbol.overlap(SQ, CI)),
            (ScaleDegree.vii, BlockSymbol.doubled(TR)),
        ],
    )
    def test_symbol_table(self, degree, expected):
        assert symbol_for(degree) == expected

    def test_symbol_injective(self):
        symbols = [symbol_for(d) for d in DEGREES]
        assert len(set(symbols)) == 7

    def test_symbol_shape_constraints(self):
        with pytest.raises(ValueError):
            BlockSymbol(SymbolArrangement.SINGLE, (SQ, SQ))
        with pytest.raises(ValueError):
            BlockSymbol(SymbolArrangement.DOUBLED, (SQ, TR))
        with pytest.raises(ValueError):
            BlockSymbol(SymbolArrangement.OVERLAP, (TR, TR))


class TestSuccessorTable:
    def test_pure_dominant_row(self):
        assert successor_table(functions_of(ScaleDegree.V)) == frozenset({D, T})

    def test_pure_tonic_row_allows_everything(self):
        assert successor_table(functions_of(ScaleDegree.I)) == frozenset({T, S, D})

    def test_dual_function_union(self):
        assert successor_table(functions_of(ScaleDegree.iii)) == frozenset({T, S, D})


class TestMakeBlock:
    def test_default_dominant_tenon(self):
        block = make_block(ScaleDegree.V)
        assert block.tenon.allowed_successor_functions == frozenset({D, T})

    def test_default_tonic_symbol(self):
        assert make_block(ScaleDegree.I).symbol == BlockSymbol.single(SQ)

    def test_restricted_tenon_allowed(self):
        block = make_block(ScaleDegree.V, tenon=TenonProfile(frozenset({T})))
        assert block.tenon.allowed_successor_functions == frozenset({T})

    def test_tenon_outside_successor_set_rejected(self):
        with pytest.raises(InvalidTenon):
            make_block(ScaleDegree.V, tenon=TenonProfile(frozenset({S})))

    def test_mortise_must_match_functions(self):
        with pytest.raises(InvalidMortise):
            make_block(ScaleDegree.I, mortise=MortiseProfile(frozenset({D})))
        block = make_block(
            ScaleDegree.vi, mortise=MortiseProfile(frozenset({T, S}))
        )
        assert block.mortise.accepted_own_functions == frozenset({T, S})

    def test_ids_unique_by_default(self):
        assert make_block(ScaleDegree.I).id != make_block(ScaleDegree.I).id


class TestCanConnect:
    @pytest.mark.parametrize(
        "left,right,expected",
        [
            (ScaleDegree.V, ScaleDegree.I, True),     # authentic cadence
            (ScaleDegree.V, ScaleDegree.IV, False),   # dominant never falls to subdominant
            (ScaleDegree.V, ScaleDegree.vi, True),    # deceptive resolution
            (ScaleDegree.vii, ScaleDegree.ii, False),
            (ScaleDegree.ii, ScaleDegree.V, True),
        ],
    )
    def test_examples(self, left, right, expected):
        assert can_connect(make_block(left), make_block(right)) is expected

    def test_reflexive_for_all_degrees(self):
        for degree in DEGREES:
            assert can_connect(make_block(degree), make_block(degree))

    def test_failures_are_exactly_pure_dominant_to_pure_subdominant(self):
        for a in DEGREES:
            for b in DEGREES:
                expected = not (
                    functions_of(a).functions == frozenset({D})
                    and functions_of(b).functions == frozenset({S})
                )
                assert can_connect(make_block(a), make_block(b)) is expected

    def test_restricting_tenon_never_adds_connections(self):
        for a in DEGREES:
            default = make_block(a)
            full = sorted(default.tenon.allowed_successor_functions, key=lambda f: f.value)
            subsets = [
                frozenset(c)
                for size in range(1, len(full) + 1)
                for c in combinations(full, size)
            ]
            for subset in subsets:
                restricted = make_block(a, tenon=TenonProfile(subset))
                for b in DEGREES:
                    target = make_block(b)
                    if can_connect(restricted, target):
                        assert can_connect(default, target)


class TestCompatibilityMatrix:
    def test_totals(self):
        matrix = compatibility_matrix()
        assert sum(sum(row) for row in matrix) == 45

    def test_tonic_row_all_true(self):
        assert all(compatibility_matrix()[0])

    def test_forbidden_cells(self):
        matrix = compatibility_matrix()
        index = {d: i for i, d in enumerate(DEGREES)}
        forbidden = {
            (a, b)
            for a in DEGREES
            for b in DEGREES
            if not matrix[index[a]][index[b]]
        }
        assert forbidden == {
            (ScaleDegree.V, ScaleDegree.IV),
            (ScaleDegree.V, ScaleDegree.ii),
            (ScaleDegree.vii, ScaleDegree.IV),
            (ScaleDegree.vii, ScaleDegree.ii),
        }


class TestSerialization:
    def test_round_trip_preserves_connectors(self):
        block = make_block(
            ScaleDegree.V, tenon=TenonProfile(frozenset({T})), block_id="v1"
        )
        record = block_to_record(block)
        assert record == {
            "id": "v1",
            "degree": "V",
            "tenon": ["tonic"],
            "mortise": ["dominant"],
        }
        assert block_from_record(record) == block

    def test_function_name_order_canonical(self):
        record = block_to_record(make_block(ScaleDegree.vi, block_id="x"))
        assert record["tenon"] == ["tonic", "subdominant", "dominant"]
        assert record["mortise"] == ["tonic", "subdominant"]
