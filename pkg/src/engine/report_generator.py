import html
import json
import time
from pathlib import Path
from typing import Any

from src.models.report import CheckReport


class VerificationReportGenerator:
    """Collects suite events; the JSON report is byte-stable unless timings are requested."""

    def __init__(self, timings: bool = False):
        self.events: list[dict] = []
        self.timings = timings
        self.suite_name: str = ""
        self.context: dict[str, Any] = {}
        self._clock: dict[str, float] = {}
        self._durations: dict[str, float] = {}

    def start_suite(self, suite_name: str, context: dict[str, Any] | None = None):
        self.suite_name = suite_name
        self.context = context or {}
        self._clock["suite"] = time.perf_counter()
        self.events.append({"type": "suite_start", "suite": suite_name, "context": self.context})

    def start_check(self, name: str):
        self._clock[name] = time.perf_counter()

    def log_check(self, group: str, report: CheckReport):
        if group in self._clock:
            self._durations[group] = self._durations.get(group, 0.0) + time.perf_counter() - self._clock.pop(group)
        self.events.append({"type": "check", "group": group, **report.to_dict(max_mismatches=0)})
        for witness in report.mismatches[:3]:
            self.log_counterexample(group, report.identity, witness)

    def log_counterexample(self, group: str, identity: str, witness: dict[str, Any]):
        self.events.append({"type": "counterexample", "group": group, "identity": identity, "witness": witness})

    def log_skip(self, group: str, reason: str):
        self.events.append({"type": "skip", "group": group, "reason": reason})

    def end_suite(self):
        checks = self.checks()
        status = "passed" if all(c["passed"] for c in checks) else "failed"
        self.events.append({
            "type": "suite_end",
            "status": status,
            "identities": len(checks),
            "failed": [c["identity"] for c in checks if not c["passed"]],
        })
        if "suite" in self._clock:
            self._durations["suite"] = time.perf_counter() - self._clock.pop("suite")

    def checks(self) -> list[dict]:
        return [e for e in self.events if e["type"] == "check"]

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks())

    def to_dict(self) -> dict[str, Any]:
        report = {
            "suite": self.suite_name,
            "context": self.context,
            "passed": self.passed,
            "events": self.events,
        }
        if self.timings:
            report["timings"] = {k: round(v, 3) for k, v in sorted(self._durations.items())}
        return report

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)

    def generate_json_report(self, output_path: str | Path) -> Path:
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n")
        return path

    def generate_html_report(self, output_path: str | Path) -> Path:
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self._build_html())
        return path

    def _build_html(self) -> str:
        checks = self.checks()
        skips = [e for e in self.events if e["type"] == "skip"]
        counterexamples = [e for e in self.events if e["type"] == "counterexample"]
        passed = len([c for c in checks if c["passed"]])
        failed = len(checks) - passed

        rows = []
        for c in checks:
            status = '<span class="status-yes">PASS</span>' if c["passed"] else '<span class="status-no">FAIL</span>'
            rows.append(
                f'<tr><td class="report-name">{html.escape(c["group"])}</td>'
                f'<td>{html.escape(c["identity"])}</td><td>{c["checked"]}</td>'
                f'<td>{c["mismatch_count"]}</td><td>{status}</td></tr>'
            )
        for s in skips:
            rows.append(
                f'<tr><td class="report-name">{html.escape(s["group"])}</td><td colspan="3">'
                f'{html.escape(s["reason"])}</td><td><span class="status-skip">SKIP</span></td></tr>'
            )
        witnesses = "".join(
            f'<pre>{html.escape(e["identity"])}: {html.escape(json.dumps(e["witness"], sort_keys=True, default=str))}</pre>'
            for e in counterexamples
        )
        context = " &bull; ".join(f"{html.escape(str(k))}: {html.escape(str(v))}" for k, v in sorted(self.context.items()))

        return f'''<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <title>Verification Report - {html.escape(self.suite_name)}</title>
    <style>
        * {{ margin: 0; padding: 0; box-sizing: border-box; }}
        body {{
            font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif;
            background: #0f172a;
            color: #e2e8f0;
            padding: 2rem;
        }}
        .container {{ max-width: 1200px; margin: 0 auto; }}
        .header {{
            background: linear-gradient(135deg, #1e293b 0%, #334155 100%);
            border-radius: 16px;
            padding: 2rem;
            margin-bottom: 2rem;
            border: 1px solid #475569;
        }}
        .header h1 {{ font-size: 1.75rem; margin-bottom: 0.5rem; color: #f8fafc; }}
        .header .subtitle {{ color: #94a3b8; font-size: 0.95rem; }}
        .stats {{
            display: grid;
            grid-template-columns: repeat(auto-fit, minmax(150px, 1fr));
            gap: 1rem;
            margin-bottom: 2rem;
        }}
        .stat-card {{
            background: #1e293b;
            border-radius: 12px;
            padding: 1.25rem;
            text-align: center;
            border: 1px solid #334155;
        }}
        .stat-card .value {{ font-size: 2rem; font-weight: 700; }}
        .stat-card .label {{ color: #94a3b8; font-size: 0.85rem; margin-top: 0.25rem; }}
        .stat-card.success .value {{ color: #4ade80; }}
        .stat-card.error .value {{ color: #f87171; }}
        .stat-card.skip .value {{ color: #fbbf24; }}
        .section {{
            background: #1e293b;
            border-radius: 16px;
            padding: 1.5rem;
            margin-bottom: 1.5rem;
            border: 1px solid #334155;
        }}
        .section h2 {{ font-size: 1.1rem; margin-bottom: 1rem; color: #f8fafc; }}
        .summary-table {{ width: 100%; border-collapse: collapse; }}
        .summary-table th {{
            background: #334155;
            color: #f8fafc;
            padding: 0.75rem 1rem;
            text-align: left;
            font-size: 0.85rem;
        }}
        .summary-table td {{ padding: 0.75rem 1rem; border-bottom: 1px solid #334155; font-size: 0.9rem; }}
        .summary-table .report-name {{ color: #f8fafc; font-weight: 500; }}
        .status-yes {{ color: #4ade80; font-weight: 600; }}
        .status-no {{ color: #f87171; font-weight: 600; }}
        .status-skip {{ color: #fbbf24; font-weight: 600; }}
        pre {{ white-space: pre-wrap; font-size: 0.8rem; color: #94a3b8; margin-bottom: 0.5rem; }}
    </style>
</head>
<body>
    <div class="container">
        <div class="header">
            <h1>Verification Report</h1>
            <div class="subtitle">{html.escape(self.suite_name)} &bull; {context}</div>
        </div>
        <div class="stats">
            <div class="stat-card success"><div class="value">{passed}</div><div class="label">Identities Passed</div></div>
            <div class="stat-card error"><div class="value">{failed}</div><div class="label">Identities Failed</div></div>
            <div class="stat-card skip"><div class="value">{len(skips)}</div><div class="label">Skipped</div></div>
        </div>
        <div class="section">
            <h2>Checks</h2>
            <table class="summary-table">
                <thead><tr><th>Group</th><th>Identity</th><th>Checked</th><th>Mismatches</th><th>Status</th></tr></thead>
                <tbody>{"".join(rows)}</tbody>
            </table>
        </div>
        <div class="section">
            <h2>Counterexamples</h2>
            {witnesses or "<pre>none</pre>"}
        </div>
    </div>
</body>
</html>
'''
