import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rfi_teleportation.errors import GroupTooLargeError, NotARepresentationError, ValidationError
from rfi_teleportation.reps import (ClassFunction, basic_permutation_characters, character, decompose_into_basics,
                                    end_character)
from rfi_teleportation.ueb import builtin_z2_example, pauli_basis
from rfi_teleportation.utils.data_parser import (ArtifactParser, class_function_to_json, complex_from_json, loadJson,
                                                 matrix_from_json, saveJson)

S3_GROUP = {'degree': 3, 'generators': [[1, 0, 2], [1, 2, 0]], 'name': 'S3'}


def _write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_load_json_reports_missing_and_malformed_files(tmp_path):
    with pytest.raises(ValidationError, match='not found'):
        loadJson(str(tmp_path / 'absent.json'))
    broken = tmp_path / 'broken.json'
    broken.write_text('{"degree": 3,')
    with pytest.raises(ValidationError, match='decode'):
        loadJson(str(broken))


def test_save_json_creates_directories(tmp_path):
    target = tmp_path / 'a' / 'b' / 'out.json'
    saveJson({'x': [1, 2]}, str(target))
    assert loadJson(str(target)) == {'x': [1, 2]}
    assert target.read_text().endswith('\n')


@pytest.mark.parametrize('value, expected', [(2, 2 + 0j), (0.5, 0.5 + 0j), ([0, -1], -1j)])
def test_complex_from_json(value, expected):
    assert complex_from_json(value) == expected


@pytest.mark.parametrize('value', [[1, 2, 3], 'x', None, [1, 'a']])
def test_complex_from_json_rejects(value):
    with pytest.raises(ValidationError):
        complex_from_json(value)


def test_matrix_from_json_rejects_ragged_rows():
    with pytest.raises(ValidationError, match='lengths'):
        matrix_from_json([[1, 0], [0]])
    with pytest.raises(ValidationError):
        matrix_from_json([])


def test_rep_resolves_group_file_relative_to_itself(tmp_path):
    sub = tmp_path / 'inputs'
    sub.mkdir()
    _write(sub / 'group.json', S3_GROUP)
    swap = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    cycle = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    path = _write(sub / 'rep.json', {'group': 'group.json', 'dimension': 3, 'generator_matrices': [swap, cycle]})
    rep = ArtifactParser().loadRep(path)
    assert rep.group.order == 6
    assert character(rep).as_integers() == (3, 1, 0)


def test_rep_rejects_inconsistent_matrices(tmp_path):
    # a 3-cycle cannot be sent to the identity while a transposition goes to -1
    data = {'group': S3_GROUP, 'dimension': 1, 'generator_matrices': [[[-1]], [[-1]]]}
    with pytest.raises(NotARepresentationError):
        ArtifactParser().loadRep(_write(tmp_path / 'rep.json', data))


def test_rep_rejects_declared_dimension_mismatch(tmp_path):
    data = {'group': S3_GROUP, 'dimension': 2, 'generator_matrices': [[[1]], [[1]]]}
    with pytest.raises(ValidationError):
        ArtifactParser().loadRep(_write(tmp_path / 'rep.json', data))


def test_missing_fields_are_named(tmp_path):
    with pytest.raises(ValidationError, match='generator_matrices'):
        ArtifactParser().loadRep(_write(tmp_path / 'rep.json', {'group': S3_GROUP, 'dimension': 2}))


def test_group_cap_is_applied(tmp_path):
    path = _write(tmp_path / 'group.json', S3_GROUP)
    with pytest.raises(GroupTooLargeError):
        ArtifactParser(cap=5).loadGroup(path)


def test_load_input_tells_gsets_from_reps(tmp_path):
    parser = ArtifactParser()
    kind, X = parser.loadInput(_write(tmp_path / 'x.json', {
        'group': S3_GROUP, 'size': 3, 'generator_images': [[1, 0, 2], [1, 2, 0]]}))
    assert kind == 'gset' and X.size == 3
    kind, rep = parser.loadInput(_write(tmp_path / 'r.json', {
        'group': S3_GROUP, 'dimension': 1, 'generator_matrices': [[[1]], [[1]]]}))
    assert kind == 'rep' and rep.dimension == 1


def test_gset_size_must_match_images(tmp_path):
    data = {'group': S3_GROUP, 'size': 4, 'generator_images': [[1, 0, 2], [1, 2, 0]]}
    with pytest.raises(ValidationError, match='size'):
        ArtifactParser().loadInput(_write(tmp_path / 'x.json', data))


def test_bundle_keeps_hadamard_provenance_and_drops_sigma(tmp_path):
    parser = ArtifactParser()
    _, gueb = builtin_z2_example()
    data = parser.bundleToJson(gueb)
    assert data['sigma']['1'] == [1, 0, 3, 2]
    data['provenance'] = {'method': 'hadamard', 'hadamard': [[1, 1], [1, -1]]}
    loaded = parser.bundleFromJson(data)
    assert_allclose(loaded.elements, gueb.elements, atol=1e-15)
    assert_allclose(loaded.provenance['hadamard'], [[1, 1], [1, -1]])
    assert not hasattr(loaded, 'sigma')


def test_plain_bundle_has_empty_sigma():
    data = ArtifactParser().bundleToJson(pauli_basis())
    assert data['sigma'] == {}
    assert len(data['elements']) == 4


def test_bundle_element_shapes_are_checked():
    data = ArtifactParser().bundleToJson(pauli_basis())
    data['dimension'] = 3
    with pytest.raises(ValidationError, match='3 x 3'):
        ArtifactParser().bundleFromJson(data)


def test_load_matrix_accepts_bare_and_wrapped(tmp_path):
    parser = ArtifactParser()
    bare = parser.loadMatrix(_write(tmp_path / 'a.json', [[1, 0], [0, [0, 1]]]))
    wrapped = parser.loadMatrix(_write(tmp_path / 'b.json', {'matrix': [[1, 0], [0, [0, 1]]]}))
    assert_allclose(bare, np.diag([1, 1j]))
    assert_allclose(wrapped, bare)


def test_class_function_json_is_integral_when_possible(s3, s3_irrep):
    data = class_function_to_json(character(s3_irrep))
    assert data['values'] == [2, 0, -1]
    assert all(isinstance(v, int) for v in data['values'])
    assert data['class_representatives'][0] == [0, 1, 2]


def test_certificates_serialize_to_json(s3, s3_irrep):
    parser = ArtifactParser()
    infeasible = decompose_into_basics(end_character(s3_irrep), basic_permutation_characters(s3))
    data = json.loads(json.dumps(parser.certificateToJson(infeasible)))
    assert data == {'feasible': False, 'coefficients': None, 'bounds': [0, 1, 2, 4], 'nodes': infeasible.nodes,
                    'target': [4, 0, 1]}
    natural = ClassFunction(s3, (3, 1, 0))
    feasible = decompose_into_basics(natural, basic_permutation_characters(s3))
    assert json.loads(json.dumps(parser.certificateToJson(feasible)))['coefficients'] == [0, 1, 0, 0]
    assert parser.certificateToJson(None) is None


def test_bundle_with_missing_elements_is_rejected():
    data = ArtifactParser().bundleToJson(pauli_basis())
    del data['elements'][-1]
    with pytest.raises(ValidationError, match='4 elements, got 3'):
        ArtifactParser().bundleFromJson(data)
