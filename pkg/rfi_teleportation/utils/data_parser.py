"""
DESCRIPTION:
    JSON file formats of the toolkit: groups, representations, G-sets, UEB
    bundles, fidelity reports and analysis reports.

COMMENTS:
    Complex numbers are written as [re, im] pairs, matrices as lists of rows.
    A "group" entry in a representation or G-set file is either an inline
    group object or the path of a group file, relative to the referring file.
"""

import json
import logging
import os

import numpy as np

from rfi_teleportation.config import TOOL_VERSION
from rfi_teleportation.errors import ValidationError
from rfi_teleportation.groups import gset_from_generator_images, make_group
from rfi_teleportation.linalg import as_matrix
from rfi_teleportation.reps import make_representation
from rfi_teleportation.ueb import GEquivariantUEB, UnitaryErrorBasis

logger = logging.getLogger(__name__)


def loadJson(json_path):
    """
    Loads a JSON file.

    Parameters:
    - json_path: Path to the JSON file.

    Returns:
    - data: The JSON data.
    """
    try:
        with open(json_path, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"Error: The file at {json_path} was not found.")
    except json.JSONDecodeError as e:
        raise ValidationError(f"Error: Failed to decode the JSON file {json_path} ({e.msg}, line {e.lineno}).")


def saveJson(data, json_path):
    """
    Saves a JSON file, creating the parent directory if needed.

    Parameters:
    - data: The JSON data.
    - json_path: Path to the JSON file.
    """
    directory = os.path.dirname(os.path.abspath(json_path))
    os.makedirs(directory, exist_ok=True)
    with open(json_path, 'w') as f:
        json.dump(data, f, indent=2)
        f.write('\n')
    logger.info(f"Step Completed: JSON data saved to {json_path}.")


### COMPLEX VALUES ###
def complex_to_json(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(value):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ValidationError(f"Error: expected a number or an [re, im] pair, got {value!r}.")


def matrix_to_json(M):
    return [[complex_to_json(z) for z in row] for row in np.asarray(M)]


def matrix_from_json(rows):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError("Error: a matrix must be a non-empty list of rows.")
    if len({len(r) for r in rows}) != 1:
        raise ValidationError("Error: matrix rows have different lengths.")
    return as_matrix([[complex_from_json(z) for z in row] for row in rows])


def class_function_to_json(chi, tol=None):
    """Integer values when the class function is integral, [re, im] pairs otherwise."""
    integers = chi.as_integers(tol)
    values = list(integers) if integers is not None else [complex_to_json(v) for v in chi.values]
    return {
        'values': values,
        'class_representatives': [chi.group.perms[g].tolist() for g in chi.group.class_representatives],
    }


def _int_list(values):
    return None if values is None else [int(v) for v in values]


def _require(data, keys, what):
    if not isinstance(data, dict):
        raise ValidationError(f"Error: a {what} file must hold a JSON object.")
    missing = [k for k in keys if k not in data]
    if missing:
        raise ValidationError(f"Error: {what} is missing the field(s) {missing}.")


class ArtifactParser:
    """
    Reads and writes the toolkit's files.

    Attributes:
    - tol: Tolerance used when validating loaded representations.
    - cap: Element cap for loaded groups.
    """

    def __init__(self, tol=None, cap=None):
        self.tol = tol
        self.cap = cap

    ### GROUPS ###
    def groupToJson(self, G):
        data = {'degree': G.degree, 'generators': [list(s.images) for s in G.generators]}
        if G.name is not None:
            data['name'] = G.name
        return data

    def groupFromJson(self, data, base_dir='.'):
        if isinstance(data, str):
            return self.loadGroup(os.path.join(base_dir, data))
        _require(data, ['degree', 'generators'], 'group')
        kwargs = {} if self.cap is None else {'cap': self.cap}
        return make_group(data['degree'], data['generators'], name=data.get('name'), **kwargs)

    def loadGroup(self, path):
        return self.groupFromJson(loadJson(path), os.path.dirname(path))

    ### REPRESENTATIONS ###
    def repToJson(self, rep, group_ref=None):
        """
        Parameters:
        - rep: Representation.
        - group_ref: relative path of a group file to reference instead of inlining the group.
        """
        return {
            'group': group_ref if group_ref is not None else self.groupToJson(rep.group),
            'dimension': rep.dimension,
            'generator_matrices': [matrix_to_json(M) for M in rep.generator_matrices],
        }

    def repFromJson(self, data, base_dir='.'):
        _require(data, ['group', 'dimension', 'generator_matrices'], 'representation')
        G = self.groupFromJson(data['group'], base_dir)
        matrices = [matrix_from_json(M) for M in data['generator_matrices']]
        rep = make_representation(G, matrices, self.tol, dimension=data['dimension'])
        if rep.dimension != data['dimension']:
            raise ValidationError(f"Error: declared dimension {data['dimension']} but matrices are {rep.dimension} x {rep.dimension}.")
        return rep

    def loadRep(self, path):
        return self.repFromJson(loadJson(path), os.path.dirname(path))

    ### G-SETS ###
    def gsetToJson(self, X, group_ref=None):
        return {
            'group': group_ref if group_ref is not None else self.groupToJson(X.group),
            'size': X.size,
            'generator_images': X.generator_images(),
        }

    def gsetFromJson(self, data, base_dir='.'):
        _require(data, ['group', 'size', 'generator_images'], 'G-set')
        G = self.groupFromJson(data['group'], base_dir)
        X = gset_from_generator_images(G, data['generator_images'], size=data['size'])
        if X.size != data['size']:
            raise ValidationError(f"Error: declared size {data['size']} but generator images act on {X.size} points.")
        return X

    def loadInput(self, path):
        """
        A G-set or a representation file, told apart by its fields.

        Returns:
        - ('gset', GSet) or ('rep', Representation).
        """
        data = loadJson(path)
        base_dir = os.path.dirname(path)
        if isinstance(data, dict) and 'generator_images' in data:
            return 'gset', self.gsetFromJson(data, base_dir)
        return 'rep', self.repFromJson(data, base_dir)

    ### UEB BUNDLES ###
    def bundleToJson(self, ueb):
        """A UnitaryErrorBasis or a GEquivariantUEB; sigma is written only for the latter."""
        base = ueb.base if isinstance(ueb, GEquivariantUEB) else ueb
        provenance = {}
        for key, value in base.provenance.items():
            provenance[key] = matrix_to_json(value) if isinstance(value, np.ndarray) else value
        data = {
            'dimension': base.dimension,
            'elements': [matrix_to_json(U) for U in base.elements],
            'sigma': {},
            'provenance': provenance,
        }
        if isinstance(ueb, GEquivariantUEB):
            data['sigma'] = {str(g): row.tolist() for g, row in enumerate(ueb.sigma)}
        return data

    def bundleFromJson(self, data):
        """
        The basis stored in a bundle. A stored sigma is not trusted and not returned;
        callers re-derive it with verify_equivariance.
        """
        _require(data, ['dimension', 'elements'], 'UEB bundle')
        elements = np.array([matrix_from_json(U) for U in data['elements']])
        d = data['dimension']
        if elements.ndim != 3 or elements.shape[1:] != (d, d):
            raise ValidationError(f"Error: bundle elements are not {d} x {d} matrices.")
        if elements.shape[0] != d * d:
            raise ValidationError(f"Error: a unitary error basis in dimension {d} has {d * d} elements, got {elements.shape[0]}.")
        provenance = dict(data.get('provenance') or {'method': 'user'})
        for key in ('hadamard', 'change_of_basis'):
            if key in provenance:
                provenance[key] = matrix_from_json(provenance[key])
        return UnitaryErrorBasis(d, elements, provenance)

    def loadBundle(self, path):
        return self.bundleFromJson(loadJson(path))

    def loadMatrix(self, path):
        """A bare matrix, or an object with a 'matrix' field."""
        data = loadJson(path)
        if isinstance(data, dict):
            _require(data, ['matrix'], 'matrix')
            data = data['matrix']
        return matrix_from_json(data)

    ### REPORTS ###
    def fidelityReportToJson(self, report):
        return {
            'tool_version': TOOL_VERSION,
            'group': report.group,
            'procedure': report.procedure,
            'trials': report.trials,
            'seed': report.seed,
            'grid_min': report.grid,
            'global_min': report.global_min,
            'global_max': report.global_max,
            'max_deviation': report.max_deviation,
            'min_purity': report.min_purity,
            'tolerance': report.tolerance,
        }

    def certificateToJson(self, certificate):
        if certificate is None:
            return None
        return {
            'feasible': bool(certificate.feasible),
            'coefficients': _int_list(certificate.coefficients),
            'bounds': _int_list(certificate.bounds),
            'nodes': int(certificate.nodes),
            'target': _int_list(certificate.target),
        }
