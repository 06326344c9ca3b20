"""CARP: Card Analysis and Recognition Program.

Classical-vision playing card detection (k-means segmentation, border
following, RDP simplification, homography reprojection, HoG + KNN
classification) feeding a rule-based blackjack basic-strategy advisor.
"""

from .classify import (
    CARD_LABELS,
    HogParams,
    KnnModel,
    classify_card,
    compute_hog,
    knn_predict,
    load_model,
    save_model,
    train_knn,
)
from .contours import (
    Contour,
    Polygon,
    extract_card_quads,
    find_external_contours,
    perimeter,
    polygon_area,
    simplify_rdp,
)
from .dataset import (
    EvalReport,
    LabeledPatch,
    evaluate_patches,
    evaluate_scenes,
    load_training_dir,
    weighted_average,
)
from .errors import CarpError
from .pipeline import AnalysisResult, CardDetection, analyze, detect_cards
from .raster import (
    BinaryMask,
    ImageGray,
    ImageRGB,
    load_image,
    resize_cubic,
    rgb_to_gray,
    rgb_to_hsv,
    save_image,
    threshold_range,
)
from .reproject import (
    Homography,
    Quad,
    extract_corner,
    order_points,
    quad_dims,
    reproject_card,
    solve_homography,
    warp_perspective,
)
from .segmentation import ClusterResult, KMeansParams, kmeans_pixels, score_clusters, segment_cards
from .strategy import (
    Hand,
    Move,
    RANKS,
    assign_roles,
    calculate_hand_total,
    dealer_upcard,
    normalize_rank,
    recommend,
)
from .synth import (
    CardPlacement,
    SceneSpec,
    SyntheticScene,
    blackjack_scene,
    make_training_dir,
    random_scene,
    random_scenes,
    render_scene,
)

__version__ = "0.1.0"
