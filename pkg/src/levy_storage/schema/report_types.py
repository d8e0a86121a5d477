"""report_types.py: Rows, summaries and metadata of an experiment report."""

from pydantic import BaseModel, Field

ROW_FIELDS = ("experiment_id", "alpha", "delta", "xi", "horizon", "n", "phi_hat", "sigma_hat_sq", "ci_lo", "ci_hi",
              "phi_true", "phi_sim", "seed")
SUMMARY_FIELDS = ("group", "alpha", "delta", "K", "count", "coverage", "empirical_variance", "reference_variance",
                  "bias")


class ReportRow(BaseModel):
    """One estimate of one experiment.

    Properties:
        - experiment_id: Identifier of the run inside the experiment (replication, horizon step, K, ...).
        - phi_true:      Exponent of the configured model, when it has a closed form.
        - phi_sim:       Exponent of the simulated model (the truncated surrogate for infinite-activity inputs).
    """
    experiment_id: str
    alpha: float
    delta: float
    xi: float
    horizon: float
    n: int
    phi_hat: float
    sigma_hat_sq: float | None = None
    ci_lo: float | None = None
    ci_hi: float | None = None
    phi_true: float | None = None
    phi_sim: float | None = None
    seed: int


class SummaryEntry(BaseModel):
    """Aggregate over the rows of one group."""
    group: str
    alpha: float
    delta: float
    K: int = 1
    count: int
    coverage: float | None = None
    empirical_variance: float | None = None
    reference_variance: float | None = None
    bias: float | None = None


class ExperimentReport(BaseModel):
    """Result of one command: rows, summary block and key/value metadata."""
    rows: list[ReportRow] = Field(default_factory=list)
    summary: list[SummaryEntry] = Field(default_factory=list)
    metadata: dict[str, str] = Field(default_factory=dict)
