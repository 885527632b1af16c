"""Room occupancy estimation from environmental sensor time series.

Thin Python layer over the C++ core: synthetic data generation, CSV parsing,
windowing, LSTM training (classifier with one-hot output or regression
baseline), evaluation, and SVG plotting.
"""

from occulstm._core import (  # noqa: F401
    NUM_CLASSES,
    ClassMetrics,
    ConfusionCounts,
    DatasetSplit,
    EpochStats,
    Error,
    Evaluation,
    Hyper,
    MetricsReport,
    Mode,
    Model,
    ModelConfig,
    NormStats,
    OccupancySchedule,
    RoomParams,
    SensorReading,
    SeriesPoint,
    Session,
    WindowedDataset,
    bce_loss,
    clamp_count,
    compute_norm_stats,
    confusion,
    decode_argmax,
    derive_seed,
    evaluate_model,
    f1_score,
    fit,
    format_timestamp,
    gen_readings,
    gen_schedule,
    gradient_check,
    group_by_day,
    history_to_csv,
    make_windows,
    metrics_from_counts,
    metrics_to_csv,
    metrics_to_text,
    mse_loss,
    occupancy_at,
    one_hot_encode,
    parse_sensor_csv,
    parse_series_csv,
    parse_timestamp,
    precision_recall,
    predict_classes,
    predict_probs,
    render_series_svg,
    round_to_class,
    schedule_to_csv,
    serialize_sensor_csv,
    series_to_csv,
    sigmoid,
    softmax,
    split_by_days,
)

__version__ = "0.1.0"
