"""create runs, constants and trials tables"""

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision = "20261017_create_run_tables"
down_revision = None
branch_labels = None
depends_on = None


def upgrade() -> None:
    op.create_table(
        "runs",
        sa.Column("id", sa.Integer(), primary_key=True, autoincrement=True),
        sa.Column("command", sa.Text(), nullable=False),
        sa.Column("family", sa.Text(), nullable=False),
        sa.Column("p", sa.Float(), nullable=False),
        sa.Column("eps", sa.Float(), nullable=True),
        sa.Column("seed", sa.Integer(), nullable=True),
        sa.Column("mode", sa.Text(), nullable=False),
        sa.Column("toolkit_version", sa.Text(), nullable=False),
        sa.Column("config_json", sa.Text(), nullable=False),
    )
    op.create_table(
        "constants",
        sa.Column("id", sa.Integer(), primary_key=True, autoincrement=True),
        sa.Column("run_id", sa.Integer(), sa.ForeignKey("runs.id"), nullable=False),
        sa.Column("name", sa.Text(), nullable=False),
        sa.Column("value_text", sa.Text(), nullable=False),
        sa.Column("value_float", sa.Float(), nullable=True),
        sa.Column("log10", sa.Float(), nullable=True),
        sa.Column("provenance", sa.Text(), nullable=True),
        sa.UniqueConstraint("run_id", "name", name="uq_constants_run_id_name"),
    )
    op.create_table(
        "trials",
        sa.Column("id", sa.Integer(), primary_key=True, autoincrement=True),
        sa.Column("run_id", sa.Integer(), sa.ForeignKey("runs.id"), nullable=False),
        sa.Column("trial", sa.Integer(), nullable=False),
        sa.Column("delta_achieved", sa.Float(), nullable=True),
        sa.Column("defect", sa.Float(), nullable=True),
        sa.Column("failure", sa.Text(), nullable=True),
        sa.UniqueConstraint("run_id", "trial", name="uq_trials_run_id_trial"),
    )


def downgrade() -> None:
    op.drop_table("trials")
    op.drop_table("constants")
    op.drop_table("runs")
