from .topology import MeshTopology, build_topology
from .metrics import (MeshMetrics, compute_metrics, element_measure, element_measures,
                      element_diameter_h_K, element_diameters)
from .generators import generate_structured_mesh, generate_mixed_mesh
from .loaders import MeshLoader, load_mesh, save_mesh

__all__ = ['MeshTopology', 'build_topology', 'MeshMetrics', 'compute_metrics',
           'element_measure', 'element_measures', 'element_diameter_h_K', 'element_diameters',
           'generate_structured_mesh', 'generate_mixed_mesh', 'MeshLoader', 'load_mesh', 'save_mesh']
