import pytest

from prfsig.data import ResponseCounts, records_from_counts

# modifier-relation comparison: 103 relations of interest
WORKED_COUNTS = ResponseCounts(
    c_both=19, c_only1=28, c_only2=6, miss_both=50,
    s_both=5, s_only1=43, s_only2=9, total_of_interest=103,
)


@pytest.fixture
def worked_counts():
    return WORKED_COUNTS


@pytest.fixture
def worked_records():
    return records_from_counts(WORKED_COUNTS)


@pytest.fixture
def detail_file(tmp_path, worked_records):
    path = tmp_path / "items.tsv"
    lines = ["# item\tinterest\tsys1\tsys2"]
    for rec in worked_records:
        flags = (rec.of_interest, rec.found_by_1, rec.found_by_2)
        lines.append("\t".join([rec.item_id, *(str(int(f)) for f in flags)]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
