import pytest

from greenroute.files import (FileFormatError, load_instance, read_solution,
                              write_instance, write_solution)
from greenroute.instgen import GenSpec, generate
from greenroute.model import ModelError, euclidean_distances

from helpers import make_instance


def test_instance_round_trip_is_lossless(tmp_path):
    inst = generate(GenSpec(customers=8, seed=13))
    path = tmp_path / "inst.txt"
    write_instance(inst, path)
    assert load_instance(path) == inst


def test_distances_fall_back_to_euclidean(tmp_path):
    inst = generate(GenSpec(customers=4, seed=3))
    path = tmp_path / "inst.txt"
    write_instance(inst, path)
    lines = path.read_text().splitlines()
    cut = lines.index("[distances]")
    (tmp_path / "bare.txt").write_text("\n".join(lines[:cut]) + "\n")
    loaded = load_instance(tmp_path / "bare.txt")
    assert loaded.distances == euclidean_distances(loaded.nodes)
    assert loaded == inst


def test_alpha_matrix_round_trip(tmp_path):
    inst = generate(GenSpec(customers=3, seed=5))
    alpha = [row[:] for row in inst.alpha]
    alpha[1][2] = 7.5
    import dataclasses
    bumpy = dataclasses.replace(inst, alpha=alpha)
    path = tmp_path / "inst.txt"
    write_instance(bumpy, path)
    assert "[alpha]" in path.read_text()
    assert load_instance(path) == bumpy


def test_comments_and_blank_lines_are_ignored(tmp_path):
    inst = generate(GenSpec(customers=2, seed=1))
    path = tmp_path / "inst.txt"
    write_instance(inst, path)
    text = "# header comment\n\n" + path.read_text().replace(
        "[levels]", "[levels]  # per line: id lower avg upper start end")
    (tmp_path / "commented.txt").write_text(text)
    assert load_instance(tmp_path / "commented.txt") == inst


def test_missing_section_is_an_error(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("[meta]\nn = 1\n")
    with pytest.raises(FileFormatError):
        load_instance(path)


def test_bad_row_width_is_an_error(tmp_path):
    inst = generate(GenSpec(customers=2, seed=2))
    path = tmp_path / "inst.txt"
    write_instance(inst, path)
    text = path.read_text().replace("[nodes]", "[nodes]\n0 1 2", 1)
    (tmp_path / "bad.txt").write_text(text)
    with pytest.raises(FileFormatError):
        load_instance(tmp_path / "bad.txt")


def test_semantic_problems_surface_as_model_errors(tmp_path):
    inst = make_instance([(10.0, 0.0, 1.0, 0.0, 0.0, 10.0)], horizon=10.0)
    path = tmp_path / "inst.txt"
    write_instance(inst, path)
    text = path.read_text().replace("fleet_size = 5", "fleet_size = 0")
    path.write_text(text)
    with pytest.raises(ModelError):
        load_instance(path)


def test_solution_file_round_trip(tmp_path):
    path = tmp_path / "plan.sol"
    write_solution(path, "0,1-1,1-2,1", 74.5, status="proven")
    text, meta = read_solution(path)
    assert text == "0,1-1,1-2,1"
    assert float(meta["objective"]) == 74.5
    assert meta["status"] == "proven"


def test_solution_file_rejects_two_routestrings(tmp_path):
    path = tmp_path / "plan.sol"
    path.write_text("0,1-1,1-2,1\n0,1-2,1\n")
    with pytest.raises(FileFormatError):
        read_solution(path)
