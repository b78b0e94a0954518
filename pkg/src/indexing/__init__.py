from .fans import VertexFan, EdgeFan, build_vertex_fan, build_edge_fan
from .index import BuildStats, LocatorIndex
from .builder import build_index, build_index_2d, build_index_3d

__all__ = ['VertexFan', 'EdgeFan', 'build_vertex_fan', 'build_edge_fan', 'BuildStats',
           'LocatorIndex', 'build_index', 'build_index_2d', 'build_index_3d']
