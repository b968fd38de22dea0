from pathlib import Path

from apps.cli.management.base import LatmapCommand
from apps.cli.reports import ExperimentReport


class Command(LatmapCommand):
    help = "Aggregate per-seed result files into the median and the 50%/80% quantile bands"

    def add_command_arguments(self, parser):
        parser.add_argument("inputs", nargs="+", help="SLAM results, exploration traces, navigation reports or training curves")
        parser.add_argument("--metric", default=None, help="exploration_ratio or infogain for exploration traces")
        parser.add_argument("--out", default=None, help="Report JSON path")
        parser.add_argument("--csv", default=None, help="Band CSV path (default: next to the JSON)")

    def run(self, **options):
        report = ExperimentReport.from_files(options["inputs"], options["metric"])
        json_path = self.output_path(options["out"], "report.json")
        csv_path = Path(options["csv"]) if options["csv"] else json_path.with_suffix(".csv")
        report.write(json_path, csv_path)
        self.success(f"{report.metric} over {len(report.per_seed.columns)} run(s): {json_path}, {csv_path}")
