"""Configuration enumeration, path tracing, vertex types, tables."""

import json

import pytest

from fplrs.fplcore import (
    PsiTable,
    asm_count_formula,
    count_configs,
    enumerate_configs,
    link_data,
    plaquette_indicator,
    refined_counts,
    split_prefixes,
    vertex_type,
    vertex_type_table,
)
from fplrs.lattice import BoundaryCondition, build_square
from fplrs.linkpat import LinkPattern, rotate

ASM_NUMBERS = [1, 2, 7, 42, 429, 7436, 218348]


class TestCountFormula:
    def test_known_values(self):
        assert [asm_count_formula(n) for n in range(1, 8)] == ASM_NUMBERS

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            asm_count_formula(0)


class TestEnumerate:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_counts_match_formula(self, n):
        d, t = build_square(n, "+")
        assert count_configs(d, t) == asm_count_formula(n)

    def test_single_vertex_forced(self):
        d, t = build_square(1, "+")
        configs = list(enumerate_configs(d, t))
        assert len(configs) == 1
        assert configs[0].boundary() == t

    def test_stream_is_lexicographic_and_deterministic(self):
        d, t = build_square(3, "+")
        first = [phi.bitstring() for phi in enumerate_configs(d, t)]
        second = [phi.bitstring() for phi in enumerate_configs(d, t)]
        assert first == second == sorted(first)
        assert len(set(first)) == len(first)

    @pytest.mark.parametrize("n", [2, 3])
    def test_ice_rule_everywhere(self, n):
        d, t = build_square(n, "+")
        for phi in enumerate_configs(d, t):
            assert phi.check_ice_rule()

    @pytest.mark.parametrize("n", [2, 3])
    def test_complement_bijection(self, n):
        d, t = build_square(n, "+")
        plus = {phi.complemented().bits for phi in enumerate_configs(d, t)}
        minus = {phi.bits for phi in enumerate_configs(d, t.complemented())}
        assert plus == minus

    def test_empty_ensemble_is_a_stream_not_an_error(self):
        d, _ = build_square(2, "+")
        empty = 0
        for colours in range(256):
            bits = tuple((colours >> k) & 1 for k in range(8))
            if sum(bits) % 2:
                continue
            t = BoundaryCondition(bits)
            if count_configs(d, t) == 0:
                assert list(enumerate_configs(d, t)) == []
                empty += 1
        assert empty > 0

    def test_split_reproduces_stream(self):
        d, t = build_square(4, "+")
        done, prefixes = split_prefixes(d, t, 3)
        merged = list(done)
        for prefix in prefixes:
            merged.extend(phi.bits for phi in enumerate_configs(d, t, prefix))
        assert sorted(merged) == sorted(phi.bits for phi in enumerate_configs(d, t))
        assert len(merged) == asm_count_formula(4)

    def test_parallel_count_agrees(self):
        d, t = build_square(4, "+")
        assert count_configs(d, t, jobs=2) == asm_count_formula(4)


class TestLinkData:
    def test_single_vertex(self):
        d, t = build_square(1, "+")
        ld = link_data(next(enumerate_configs(d, t)))
        assert ld.black.word == "()"
        assert ld.white.word == "()"
        assert ld.loops == 0

    def test_two_by_two_patterns(self):
        d, t = build_square(2, "+")
        words = sorted(link_data(phi).black.word for phi in enumerate_configs(d, t))
        assert words == ["(())", "()()"]

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_complement_swaps_colours(self, n):
        d, t = build_square(n, "+")
        for phi in enumerate_configs(d, t):
            ld = link_data(phi)
            ld_bar = link_data(phi.complemented())
            assert ld.black == ld_bar.white
            assert ld.white == ld_bar.black
            assert ld.loops_black == ld_bar.loops_white

    def test_patterns_are_valid_involutions(self):
        # LinkPattern construction rejects crossings and fixed points,
        # so tracing every configuration is itself the assertion.
        d, t = build_square(4, "+")
        for phi in enumerate_configs(d, t):
            link_data(phi)


class TestVertexTypes:
    def test_calibrated_table(self):
        # Pinned by the bottom-row law at sizes 2 and 3; the assignment
        # groups antipodal placements: straight pairs are c, the two
        # corner classes split into a and b.
        names = {0: "E", 1: "N", 2: "W", 3: "S"}
        table = {
            "".join(sorted(names[x] for x in key)): letter
            for key, letter in vertex_type_table().items()
        }
        assert table == {
            "EN": "a", "SW": "a",
            "ES": "b", "NW": "b",
            "EW": "c", "NS": "c",
        }

    def test_single_vertex_is_c(self):
        d, t = build_square(1, "+")
        phi = next(enumerate_configs(d, t))
        assert vertex_type(phi, (1, 1)) == "c"

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_bottom_row_reads_b_c_a(self, n):
        d, t = build_square(n, "+")
        for phi in enumerate_configs(d, t):
            row = [vertex_type(phi, (x, 1)) for x in range(1, n + 1)]
            assert row.count("c") == 1
            k = row.index("c")
            assert all(v == "b" for v in row[:k])
            assert all(v == "a" for v in row[k + 1:])

    def test_c_position_partitions_the_ensemble(self):
        n = 4
        d, t = build_square(n, "+")
        per_position = [0] * n
        for phi in enumerate_configs(d, t):
            row = [vertex_type(phi, (x, 1)) for x in range(1, n + 1)]
            per_position[row.index("c")] += 1
        assert sum(per_position) == 42


class TestPlaquetteIndicator:
    def test_values_and_antisymmetry(self):
        d, t = build_square(3, "+")
        seen = set()
        for phi in enumerate_configs(d, t):
            for alpha in d.faces:
                v = plaquette_indicator(phi, alpha)
                seen.add(v)
                assert v in (-1, 0, 1)
                assert plaquette_indicator(phi.complemented(), alpha) == -v
        assert seen == {-1, 0, 1}

    def test_class_balance_at_fig3_face(self):
        # at n=4, face (3,2): within every rotation class the +1 and -1
        # configurations pair off
        from fplrs.linkpat import rotation_class_of

        d, t = build_square(4, "+")
        tally: dict[str, list[int]] = {}
        for phi in enumerate_configs(d, t):
            cls = rotation_class_of(link_data(phi).black).word
            v = plaquette_indicator(phi, (3, 2))
            pm = tally.setdefault(cls, [0, 0])
            if v == 1:
                pm[0] += 1
            elif v == -1:
                pm[1] += 1
        assert len(tally) == 3
        assert all(pm[0] == pm[1] for pm in tally.values())


class TestRefinedCounts:
    def test_two_by_two_table(self):
        table = refined_counts(2)
        assert table.counts == {"()()": 1, "(())": 1}

    def test_n4_table_sums_to_42(self):
        table = refined_counts(4)
        assert table.total() == 42
        assert len(table.counts) == 14

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_propp_serial_arcs(self, n):
        table = refined_counts(n)
        serial = LinkPattern.serial_arcs(n)
        assert table.value(serial) == asm_count_formula(n - 1)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_rotation_invariance(self, n):
        table = refined_counts(n)
        for word, v in table.counts.items():
            assert table.value(rotate(LinkPattern.from_word(word), 1)) == v

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_sign_independence(self, n):
        assert refined_counts(n, "+").counts == refined_counts(n, "-").counts

    def test_constrained_tables_partition(self):
        n = 4
        full = refined_counts(n)
        for col in range(1, n + 1):
            parts = [refined_counts(n, "+", (col, letter)) for letter in "abc"]
            merged = parts[0].merge(parts[1]).merge(parts[2])
            assert merged.counts == full.counts

    def test_all_zero_table_is_allowed(self):
        table = refined_counts(2, "+", (1, "a"))  # corner cannot be a
        assert table.counts == {}

    def test_parallel_table_agrees(self):
        assert refined_counts(4, "+", jobs=2).counts == refined_counts(4).counts

    def test_json_round_trip(self):
        table = refined_counts(3)
        again = PsiTable.from_json(json.loads(table.dumps()))
        assert again == table

    def test_merge_is_commutative(self):
        a = refined_counts(3, "+", (1, "b"))
        b = refined_counts(3, "+", (1, "c"))
        assert a.merge(b) == b.merge(a)


@pytest.mark.slow
class TestLargeCounts:
    def test_n6(self):
        d, t = build_square(6, "+")
        assert count_configs(d, t) == 7436

    def test_n7_psi_rotation_invariance(self):
        # the table itself is the slow part; rotation invariance and the
        # total both come out of one pass
        table = refined_counts(7, "+", jobs=2)
        assert table.total() == 218348
        for word, v in table.counts.items():
            assert table.value(rotate(LinkPattern.from_word(word), 1)) == v
        assert table.value(LinkPattern.serial_arcs(7)) == asm_count_formula(6)

    def test_n6_psi_rotation_and_signs(self):
        plus = refined_counts(6, "+")
        minus = refined_counts(6, "-")
        assert plus.counts == minus.counts
        for word, v in plus.counts.items():
            assert plus.value(rotate(LinkPattern.from_word(word), 1)) == v
