from django.conf import settings  # noqa: F401

from appconf import AppConf


class OrdcalConf(AppConf):
    """Numeric defaults for fitting, calibration and studies.

    Every value is available as ``settings.ORDCAL_<NAME>`` and can be
    overridden from the project settings module.
    """
    SEED = 20210601
    THREADS = 1

    # Fitting
    TOLERANCE = 1e-8
    MAX_ITER = 100
    MAX_ALTERNATIONS = 200
    STEP_HALVINGS = 30
    SEPARATION_THRESHOLD = 30.0

    # Calibration
    CLIP_EPSILON = 1e-12
    SPLINE_DF = 4
    CURVE_POINTS = 101
    CURVE_SPAN = 0.75
    ECI_MIN_DENOMINATOR = 1e-12
    ALIAS_TOLERANCE = 1e-7

    # Studies
    SLOPE_EXCLUSION_BOUND = 20.0
    REDRAW_FACTOR = 10
    LARGE_SAMPLE_SIZE = 200000
    REPLICATES = 200
    BOOTSTRAP_SAMPLES = 200

    class Meta:
        prefix = 'ordcal'
