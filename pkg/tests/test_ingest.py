"""File loaders: formats, error reporting, round-trips."""

import pytest

from ecodiv import hill_number, make_community
from ecodiv.errors import (
    BadFilenameError,
    ConflictingPairError,
    DuplicateFineLabelError,
    DuplicateLabelError,
    DuplicateTimestampError,
    NegativeWeightError,
    ParseError,
    SumOutOfToleranceError,
    ValueOutOfRangeError,
)
from ecodiv.ingest import (
    load_loc,
    load_series,
    load_shared,
    load_similarity,
    load_snapshot,
    load_taxonomy,
    read_snapshot_file,
    write_snapshot,
)


class TestLoadSnapshot:
    def test_desktop_fixture(self, data_dir):
        c = load_snapshot(data_dir / "desktop_os_june2013.csv")
        assert c.name == "desktop_os_june2013"
        assert c.labels == ("Windows", "Mac", "Linux")
        assert c.abundances[1] == pytest.approx(7.20 / 99.99, rel=1e-12)

    def test_unit_directive_parsed(self, data_dir):
        snapshot = read_snapshot_file(data_dir / "top500_june2013.csv")
        assert snapshot.unit == "count"
        assert snapshot.raw_sum == 500

    def test_override_wins(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("# unit: percent\nspecies,share\na,60\nb,40\n")
        c = load_snapshot(path, unit="count")
        assert c.abundances == (0.6, 0.4)

    def test_missing_unit_is_a_parse_error(self, tmp_path):
        path = tmp_path / "nounits.csv"
        path.write_text("species,share\na,0.5\nb,0.5\n")
        with pytest.raises(ParseError, match="unit"):
            load_snapshot(path)

    def test_quoted_labels_with_commas(self, tmp_path):
        path = tmp_path / "quoted.csv"
        path.write_text(
            '# unit: percent\nspecies,share\n"Windows, all versions",60\nOther,40\n'
        )
        c = load_snapshot(path)
        assert c.labels[0] == "Windows, all versions"

    def test_header_only_file_is_all_zero(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("# unit: proportion\nspecies,share\n")
        with pytest.raises(Exception) as info:
            load_snapshot(path)
        from ecodiv.errors import AllZeroError

        assert isinstance(info.value, AllZeroError)

    def test_negative_weight_reports_line(self, tmp_path):
        path = tmp_path / "neg.csv"
        path.write_text("# unit: percent\nspecies,share\nWindows,99\nLinux,-1\n")
        with pytest.raises(NegativeWeightError, match=r"neg\.csv:4"):
            load_snapshot(path)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# unit: percent\nspecies,share\nWindows,ninety\n")
        with pytest.raises(ParseError) as info:
            load_snapshot(path)
        assert info.value.line == 3
        assert str(path) in str(info.value)

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "hdr.csv"
        path.write_text("name,value\na,1\n")
        with pytest.raises(ParseError, match="species,share"):
            load_snapshot(path)

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_snapshot(tmp_path / "nope.csv")

    def test_duplicate_label_reports_line(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("# unit: count\nspecies,share\na,1\na,2\n")
        with pytest.raises(DuplicateLabelError, match=r"dup\.csv:4"):
            load_snapshot(path)

    def test_sum_tolerance_passthrough_names_file(self, tmp_path):
        path = tmp_path / "off.csv"
        path.write_text("# unit: percent\nspecies,share\na,55\nb,30\n")
        with pytest.raises(SumOutOfToleranceError, match=r"off\.csv"):
            load_snapshot(path)

    def test_unknown_unit_directive(self, tmp_path):
        path = tmp_path / "u.csv"
        path.write_text("# unit: promille\nspecies,share\na,1\n")
        with pytest.raises(ParseError, match="promille"):
            load_snapshot(path)

    def test_non_finite_share_rejected(self, tmp_path):
        path = tmp_path / "inf.csv"
        path.write_text("# unit: count\nspecies,share\na,inf\nb,1\n")
        with pytest.raises(ParseError, match="finite"):
            load_snapshot(path)


class TestRoundTrip:
    def test_write_then_load_is_bit_exact(self, tmp_path):
        rng_weights = [3.7, 1.25, 0.001, 9.0]
        c = make_community(
            "round", [(f"species {i}", w) for i, w in enumerate(rng_weights)],
            unit="count",
        )
        path = tmp_path / "round.csv"
        write_snapshot(c, path)
        back = load_snapshot(path)
        assert back.labels == c.labels
        for a, b in zip(back.abundances, c.abundances):
            assert a == pytest.approx(b, abs=1e-12)

    def test_comma_labels_round_trip(self, tmp_path):
        c = make_community("odd", [("a, with comma", 0.5), ("plain", 0.5)])
        path = tmp_path / "odd.csv"
        write_snapshot(c, path)
        assert load_snapshot(path).labels == c.labels


class TestLoadTaxonomy:
    def test_vendor_fixture(self, data_dir):
        taxonomy = load_taxonomy(data_dir / "desktop_vendor_taxonomy.csv")
        assert taxonomy.name == "desktop_vendor_taxonomy"
        assert taxonomy.groups["Windows XP"] == "Windows"
        assert set(taxonomy.coarse_labels) == {"Windows", "Mac", "Linux"}

    def test_empty_mapping(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("fine,coarse\n")
        with pytest.raises(ParseError, match="no mapping rows"):
            load_taxonomy(path)

    def test_duplicate_fine_label(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("fine,coarse\na,x\na,y\n")
        with pytest.raises(DuplicateFineLabelError, match=r"t\.csv:3"):
            load_taxonomy(path)


class TestLoadSimilarity:
    def test_single_pair(self, tmp_path):
        path = tmp_path / "z.csv"
        path.write_text("a,b,z\nA,B,0.5\n")
        z = load_similarity(path)
        sub = z.submatrix(["A", "B"])
        assert sub[0, 1] == 0.5 and sub[1, 0] == 0.5
        assert sub[0, 0] == 1.0 and sub[1, 1] == 1.0

    def test_out_of_range(self, tmp_path):
        path = tmp_path / "z.csv"
        path.write_text("a,b,z\nA,B,1.5\n")
        with pytest.raises(ValueOutOfRangeError, match=r"z\.csv:2"):
            load_similarity(path)

    def test_conflicting_pair(self, tmp_path):
        path = tmp_path / "z.csv"
        path.write_text("a,b,z\nA,B,0.5\nB,A,0.4\n")
        with pytest.raises(ConflictingPairError):
            load_similarity(path)

    def test_self_row_declares_isolated_species(self, tmp_path):
        path = tmp_path / "z.csv"
        path.write_text("a,b,z\nA,B,0.5\nC,C,1\n")
        z = load_similarity(path)
        assert z.submatrix(["C", "A"])[0, 1] == 0.0

    def test_self_row_below_one_conflicts(self, tmp_path):
        path = tmp_path / "z.csv"
        path.write_text("a,b,z\nA,A,0.5\n")
        with pytest.raises(ConflictingPairError):
            load_similarity(path)


class TestLocShared:
    def test_fixture_pair(self, data_dir):
        loc = load_loc(data_dir / "loc_example.csv")
        shared = load_shared(data_dir / "shared_example.csv")
        assert loc == [("s1", 100), ("s2", 200)]
        assert shared == [("s1", "s2", 50)]

    def test_non_integer_loc(self, tmp_path):
        path = tmp_path / "loc.csv"
        path.write_text("species,total_lines\na,12.5\n")
        with pytest.raises(ParseError, match="integer"):
            load_loc(path)


class TestLoadSeries:
    def write(self, directory, name, shares):
        rows = "\n".join(f"s{i},{v}" for i, v in enumerate(shares))
        (directory / name).write_text(f"# unit: percent\nspecies,share\n{rows}\n")

    def test_single_file(self, tmp_path):
        self.write(tmp_path, "20130601T000000Z.csv", [60, 40])
        series = load_series(tmp_path)
        assert len(series) == 1
        assert series.snapshots[0].timestamp.isoformat() == "2013-06-01T00:00:00+00:00"

    def test_chronological_not_lexical(self, tmp_path):
        # lexical order of these names differs from time order
        self.write(tmp_path, "20131201T090000Z.csv", [50, 50])
        self.write(tmp_path, "20130101T120000Z.csv", [60, 40])
        self.write(tmp_path, "20130601T000000Z.csv", [70, 30])
        series = load_series(tmp_path)
        stamps = [s.timestamp for s in series.snapshots]
        assert stamps == sorted(stamps)
        assert [s.community.abundances[0] for s in series.snapshots] == [
            0.6, 0.7, 0.5,
        ]

    def test_duplicate_timestamp(self, tmp_path):
        # distinct files, same encoded instant (extension case differs)
        self.write(tmp_path, "20130601T000000Z.csv", [60, 40])
        self.write(tmp_path, "20130601T000000Z.CSV", [70, 30])
        with pytest.raises(DuplicateTimestampError):
            load_series(tmp_path)

    def test_bad_filename(self, tmp_path):
        self.write(tmp_path, "2013-06-01.csv", [60, 40])
        with pytest.raises(BadFilenameError):
            load_series(tmp_path)

    def test_non_csv_files_ignored(self, tmp_path):
        self.write(tmp_path, "20130601T000000Z.csv", [60, 40])
        (tmp_path / "README.txt").write_text("notes\n")
        assert len(load_series(tmp_path)) == 1

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ParseError, match="no snapshot files"):
            load_series(tmp_path)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(OSError):
            load_series(tmp_path / "missing")

    def test_demo_fixture_diversities(self, data_dir):
        series = load_series(data_dir / "series_demo")
        assert len(series) == 4
        values = [hill_number(s.community, 1) for s in series.snapshots]
        assert values == sorted(values, reverse=True)


class TestEncodingTolerance:
    def test_utf8_bom_accepted(self, tmp_path):
        path = tmp_path / "bom.csv"
        path.write_bytes("# unit: percent\nspecies,share\na,60\nb,40\n".encode("utf-8-sig"))
        c = load_snapshot(path)
        assert c.abundances == (0.6, 0.4)
