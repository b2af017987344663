import logging

from prometheus_client import Counter, Histogram, start_http_server

log = logging.getLogger("redbench.core.metrics")

ticks_simulated = Counter("redbench_ticks", "Simulation ticks advanced")
button_presses = Counter("redbench_button_presses", "Buttons pressed, agent trials and grading presses included")
evaluations = Counter("redbench_evaluations", "Device evaluations", ["family", "outcome"])
gateway_requests = Counter("redbench_gateway_requests", "Tool calls handled by the gateway", ["tool", "outcome"])
budget_exhausted = Counter("redbench_budget_exhausted", "Button activations refused because the trial budget ran out")
evaluation_duration = Histogram(
    "redbench_evaluation_seconds",
    "Time spent evaluating a device",
    ["family"],
    buckets=(0.001, 0.005, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, float("inf")),
)


def start_metrics_server(port: int, host: str = "localhost"):
    """
    Expose the counters above for collection by Prometheus.
    """
    start_http_server(port, addr=host)
    log.info(f"Prometheus metrics exposed on {host}:{port}")
