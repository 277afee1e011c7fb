import pytest

from iwatower.cli import main


MODULE_DOC = """\
p: 3
N: 12
d: 1
D: 30
generators: 1
relation: T1 - p
"""

ZP_DESC = "kind: Zp\nd: 1\n"


@pytest.fixture
def module_file(tmp_path):
    path = tmp_path / "mod.txt"
    path.write_text(MODULE_DOC)
    return str(path)


class TestTower:
    def test_basic(self, module_file, tmp_path, capsys):
        out = tmp_path / "tower.tsv"
        code = main(["tower", module_file, "--n-max", "3", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n\tlog_torsion\tzp_rank\tlog_mod_pn\tflags"
        torsions = [int(l.split("\t")[1]) for l in lines[1:]]
        assert torsions == [1, 2, 3, 4]

    def test_free_module(self, tmp_path):
        doc = MODULE_DOC.replace("relation: T1 - p\n", "")
        path = tmp_path / "free.txt"
        path.write_text(doc)
        out = tmp_path / "tower.tsv"
        assert main(["tower", str(path), "--n-max", "2", "--out", str(out)]) == 0
        rows = out.read_text().splitlines()[1:]
        ranks = [int(l.split("\t")[2]) for l in rows]
        assert ranks == [1, 3, 9]

    def test_parse_error_exit_1(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("p: 3\n")
        assert main(["tower", str(path)]) == 1

    def test_oversized_flagged_exit_2(self, tmp_path):
        path = tmp_path / "mod.txt"
        path.write_text(MODULE_DOC)
        out = tmp_path / "t.tsv"
        # upper levels overflow the basis bound -> flagged rows, exit 2
        code = main(
            ["tower", str(path), "--n-max", "5", "--dim-bound", "30", "--out", str(out)]
        )
        assert code == 2
        flagged = [
            l for l in out.read_text().splitlines()[1:] if "DimensionOverflow" in l
        ]
        assert flagged


class TestFitPredictPipeline:
    def test_pipeline(self, module_file, tmp_path, capsys):
        tower_out = tmp_path / "tower.tsv"
        fit_out = tmp_path / "fit.txt"
        pred_out = tmp_path / "pred.tsv"
        desc = tmp_path / "desc.txt"
        desc.write_text(ZP_DESC)
        assert main(["tower", module_file, "--n-max", "4", "--out", str(tower_out)]) == 0
        assert (
            main(
                [
                    "fit",
                    str(tower_out),
                    "--model",
                    "Iwasawa_d1",
                    "--p",
                    "3",
                    "--out",
                    str(fit_out),
                ]
            )
            == 0
        )
        text = fit_out.read_text()
        assert "mu=0" in text and "lam=1" in text
        assert (
            main(
                [
                    "predict",
                    str(fit_out),
                    str(desc),
                    "--p",
                    "3",
                    "--n-max",
                    "4",
                    "--out",
                    str(pred_out),
                ]
            )
            == 0
        )
        rows = [
            l for l in pred_out.read_text().splitlines() if l and not l.startswith(("n\t", "#"))
        ]
        assert [int(r.split("\t")[1]) for r in rows] == [0, 1, 2, 3, 4]

    def test_two_point_input_exit_1(self, tmp_path, capsys):
        path = tmp_path / "short.tsv"
        path.write_text(
            "n\tlog_torsion\tzp_rank\tlog_mod_pn\tflags\n"
            "1\t3\t0\t1\t-\n2\t9\t0\t2\t-\n"
        )
        assert main(["fit", str(path), "--model", "Iwasawa_d1", "--p", "3"]) == 1

    def test_misfit_exit_3(self, tmp_path, capsys):
        rows = ["n\tlog_torsion\tzp_rank\tlog_mod_pn\tflags"]
        for n in range(6):
            rows.append(f"{n}\t{3**n + n % 2}\t0\t0\t-")
        path = tmp_path / "noise.tsv"
        path.write_text("\n".join(rows) + "\n")
        assert main(["fit", str(path), "--model", "Iwasawa_d1", "--p", "3"]) == 3


class TestVanishing:
    def test_certified_exit_0(self, capsys):
        code = main(
            ["vanishing", "--field-label", "Q(sqrt(-4683))", "--p", "5"]
        )
        assert code == 0
        assert "certified: yes" in capsys.readouterr().out

    def test_not_certified_exit_4(self, capsys):
        code = main(
            ["vanishing", "--field-label", "Q(sqrt(-4683))", "--p", "3"]
        )
        assert code == 4
        assert "certified: no" in capsys.readouterr().out

    def test_unknown_field_exit_1(self, capsys):
        assert main(["vanishing", "--field-label", "nope", "--p", "5"]) == 1


class TestInvariants:
    def test_exact_path(self, module_file, capsys):
        assert main(["invariants", module_file]) == 0
        out = capsys.readouterr().out
        assert "method=exact" in out
        assert "mu=0" in out and "lam=1" in out


class TestHeaderOverrides:
    def test_precision_override(self, module_file, tmp_path):
        # N=2 leaves no precision margin at n=2: rows get flagged, exit 2
        out = tmp_path / "t.tsv"
        code = main(
            ["tower", module_file, "--N", "2", "--n-max", "2", "--out", str(out)]
        )
        assert code == 2
        assert "PrecisionMargin" in out.read_text()

    def test_degree_override_validated(self, module_file, capsys):
        assert main(["tower", module_file, "--D", "0", "--n-max", "2"]) == 1

    def test_invariants_override(self, module_file, capsys):
        assert main(["invariants", module_file, "--N", "8", "--D", "20"]) == 0
        assert "mu=0" in capsys.readouterr().out
