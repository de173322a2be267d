import pytest

from plotkit import CSV_COLUMNS, SchemaMismatch, read_results
from plotkit.cli import main


def write(tmp_path, header, rows):
    p = tmp_path / "results.csv"
    p.write_text("\n".join([",".join(header)] + rows) + "\n")
    return str(p)


ROW = "0,1,bestfs,rubik,solved,12,12,5,0,,"


def test_reads_published_schema(tmp_path):
    rows = read_results(write(tmp_path, CSV_COLUMNS, [ROW]))
    assert rows[0]["nodes_total"] == 12


def test_names_the_offending_column(tmp_path):
    header = list(CSV_COLUMNS)
    header[5] = "nodes"
    with pytest.raises(SchemaMismatch) as e:
        read_results(write(tmp_path, header, [ROW]))
    assert e.value.column == "nodes_total"


def test_empty_results_write_nothing(tmp_path):
    out = tmp_path / "fig.png"
    assert main(["plot", "curves", "--in", write(tmp_path, CSV_COLUMNS, []), "--out", str(out)]) == 1
    assert not out.exists()
