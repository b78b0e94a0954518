from .pseudo_angle import PseudoAngle, pseudo_angle, pseudo_angles, sector_search
from .predicates import Containment, point_in_triangle, point_in_tetrahedron, point_in_convex_polygon
from .intersections import (segment_box_intersection, segment_ball_intersection,
                            triangle_box_intersect, chi_point)
from .plane import PlaneBasis, plane_basis_for_edge, project_to_plane
from .halfspaces import ElementHalfspaces, build_halfspaces

__all__ = ['PseudoAngle', 'pseudo_angle', 'pseudo_angles', 'sector_search', 'Containment',
           'point_in_triangle', 'point_in_tetrahedron', 'point_in_convex_polygon',
           'segment_box_intersection', 'segment_ball_intersection', 'triangle_box_intersect',
           'chi_point', 'PlaneBasis', 'plane_basis_for_edge', 'project_to_plane',
           'ElementHalfspaces', 'build_halfspaces']
