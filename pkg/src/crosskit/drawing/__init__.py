from .drawing import (CombinatorialDrawing, crossing_weight, edgeless_drawing,
                      insert_edge_optimally, is_locally_optimal, planar_drawing,
                      realize, refine_locally_optimal)
