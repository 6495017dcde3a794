"""
PDF report generator for quantum eraser runs.
Renders the JSON written by ``analyze`` or ``sweep`` with tables and charts.
"""

import logging
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import matplotlib

matplotlib.use("Agg")  # Non-interactive backend
import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns
from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Image, PageBreak, Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from core.errors import DataError
from core.plotting import CONDITION_COLORS, plot_complementarity
from core.quantum.complementarity import ComplementarityFactors

logger = logging.getLogger(__name__)

sns.set_style("whitegrid")

HEADER_COLOR = colors.HexColor("#2c3e50")
LABEL_COLOR = colors.HexColor("#34495e")
ROW_COLOR = colors.HexColor("#ecf0f1")
GRID_COLOR = colors.HexColor("#bdc3c7")
MUTED_COLOR = colors.HexColor("#95a5a6")


def _estimate(entry: Optional[Dict[str, float]], digits: int = 3) -> str:
    if not entry:
        return "n/a"
    sigma = max(1, int(round(entry["sigma"] * 10**digits)))
    return f"{entry['value']:.{digits}f}({sigma})"


class PDFReportGenerator:
    """Generate PDF reports from analysis and sweep JSON files."""

    def __init__(self, page_size=A4):
        self.page_size = page_size
        self.width, self.height = page_size
        self.styles = getSampleStyleSheet()
        self._setup_styles()
        self.temp_files: List[Path] = []

    def _cleanup_temp_files(self) -> None:
        for temp_file in self.temp_files:
            temp_file.unlink(missing_ok=True)
        self.temp_files.clear()

    def _setup_styles(self) -> None:
        self.styles.add(ParagraphStyle(
            name="ReportTitle",
            parent=self.styles["Heading1"],
            fontSize=22,
            textColor=colors.HexColor("#1a1a1a"),
            spaceAfter=24,
            alignment=TA_CENTER,
            fontName="Helvetica-Bold",
        ))
        self.styles.add(ParagraphStyle(
            name="SectionHeader",
            parent=self.styles["Heading2"],
            fontSize=15,
            textColor=HEADER_COLOR,
            spaceAfter=10,
            spaceBefore=10,
            fontName="Helvetica-Bold",
        ))
        self.styles.add(ParagraphStyle(
            name="Footer",
            parent=self.styles["Normal"],
            fontSize=9,
            alignment=TA_CENTER,
            textColor=MUTED_COLOR,
        ))

    def generate_report(self, data: Dict[str, Any], output_path: Path, title: str = "Quantum Eraser Report") -> Path:
        """Write the PDF; the layout follows the kind of JSON given."""
        if "points" not in data and "fringes" not in data:
            raise DataError("input is neither an analysis report nor a sweep result")
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        doc = SimpleDocTemplate(
            str(output_path),
            pagesize=self.page_size,
            rightMargin=0.75 * inch,
            leftMargin=0.75 * inch,
            topMargin=0.75 * inch,
            bottomMargin=0.75 * inch,
            title=title,
        )

        story: List[Any] = []
        story.extend(self._create_cover(data, title))
        try:
            if "fringes" in data:
                story.append(PageBreak())
                story.extend(self._create_analysis_section(data))
            if "points" in data:
                story.append(PageBreak())
                story.extend(self._create_sweep_section(data))
            doc.build(story, onFirstPage=self._add_page_number, onLaterPages=self._add_page_number)
        finally:
            self._cleanup_temp_files()
        logger.info("Wrote PDF report %s", output_path)
        return output_path

    def _add_page_number(self, canvas_obj, doc) -> None:
        canvas_obj.saveState()
        canvas_obj.setFont("Helvetica", 9)
        canvas_obj.setFillColor(MUTED_COLOR)
        canvas_obj.drawRightString(self.width - 0.75 * inch, 0.5 * inch, f"Page {canvas_obj.getPageNumber()}")
        canvas_obj.restoreState()

    def _key_value_table(self, rows: List[List[str]]) -> Table:
        table = Table(rows, colWidths=[2.6 * inch, 3.4 * inch])
        table.setStyle(TableStyle([
            ("BACKGROUND", (0, 0), (0, -1), LABEL_COLOR),
            ("BACKGROUND", (1, 0), (1, -1), ROW_COLOR),
            ("TEXTCOLOR", (0, 0), (0, -1), colors.white),
            ("TEXTCOLOR", (1, 0), (1, -1), HEADER_COLOR),
            ("FONTNAME", (0, 0), (0, -1), "Helvetica-Bold"),
            ("FONTSIZE", (0, 0), (-1, -1), 10),
            ("GRID", (0, 0), (-1, -1), 1, GRID_COLOR),
            ("TOPPADDING", (0, 0), (-1, -1), 6),
            ("BOTTOMPADDING", (0, 0), (-1, -1), 6),
        ]))
        return table

    def _grid_table(self, header: List[str], rows: List[List[str]]) -> Table:
        table = Table([header] + rows, repeatRows=1)
        table.setStyle(TableStyle([
            ("BACKGROUND", (0, 0), (-1, 0), HEADER_COLOR),
            ("TEXTCOLOR", (0, 0), (-1, 0), colors.white),
            ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
            ("FONTSIZE", (0, 0), (-1, -1), 9),
            ("ROWBACKGROUNDS", (0, 1), (-1, -1), [colors.white, ROW_COLOR]),
            ("GRID", (0, 0), (-1, -1), 0.5, GRID_COLOR),
            ("ALIGN", (1, 0), (-1, -1), "RIGHT"),
        ]))
        return table

    def _create_cover(self, data: Dict[str, Any], title: str) -> List:
        config = data.get("config") or {}
        rows = [
            ["Scenario", str(data.get("scenario") or config.get("scenario", "n/a"))],
            ["Seed", str(data.get("seed", config.get("seed", "n/a")))],
            ["Report date", datetime.now().strftime("%Y-%m-%d")],
        ]
        if "i" in data:
            rows.append(["Welcher-weg information I", _estimate(data.get("i"))])
            rows.append(["Visibility V", _estimate(data.get("v"))])
        if "points" in data:
            rows.append(["Sweep points", str(len(data["points"]))])
        reference = data.get("reference") or {}
        if "i_value" in reference:
            rows.append([
                "Published (I, V)",
                f"{reference['i_value']:.3f} ± {reference.get('i_sigma', 0.0):.3f}, "
                f"{reference.get('v_value', float('nan')):.3f} ± {reference.get('v_sigma', 0.0):.3f}",
            ])
        return [
            Spacer(1, 1.0 * inch),
            Paragraph(title, self.styles["ReportTitle"]),
            Spacer(1, 0.4 * inch),
            self._key_value_table(rows),
            Spacer(1, 1.2 * inch),
            Paragraph("Generated by eraser-sim", self.styles["Footer"]),
        ]

    def _create_analysis_section(self, data: Dict[str, Any]) -> List:
        elements: List[Any] = [Paragraph("Conditioned fringes", self.styles["SectionHeader"])]
        fringes = data["fringes"]
        fits = fringes.get("fits", []) + fringes.get("welcher_weg_fits", [])
        rows = [
            [
                f"{fit['detector']} | {fit['condition']}",
                f"{fit['offset']:.1f}",
                f"{fit['amplitude']:.1f}",
                f"{fit['phase0']:.3f}",
                _estimate(fit["visibility"]),
                f"{fit['raw_visibility']:.3f}",
                f"{fit['reduced_residual']:.2f}",
            ]
            for fit in fits
        ]
        elements.append(self._grid_table(
            ["Fringe", "Offset", "Amplitude", "Phase (rad)", "V (fit)", "V (extrema)", "Residual"], rows
        ))
        elements.append(Spacer(1, 0.2 * inch))
        elements.append(Paragraph(
            f"Average visibility {_estimate(fringes.get('visibility'))}; R/L phase shift "
            f"{_estimate(fringes.get('phase_shift'), 2)} rad"
            + (" (background subtracted)" if fringes.get("background_subtracted") else ""),
            self.styles["Normal"],
        ))

        img_path = self._create_fringe_chart(fits)
        if img_path:
            elements.append(Spacer(1, 0.2 * inch))
            elements.append(Image(str(img_path), width=6 * inch, height=3.75 * inch))

        blocking = data.get("blocking")
        if blocking:
            elements.append(Paragraph("Path blocking", self.styles["SectionHeader"]))
            cond = blocking["condition"]
            elements.append(self._key_value_table([
                [f"P(a | {cond})", _estimate(blocking["p_a"])],
                [f"P(b | {cond})", _estimate(blocking["p_b"])],
                ["I = |P(a) - P(b)|", _estimate(blocking["i"])],
                ["Counts (a, b)", f"{blocking['counts_a']:.0f}, {blocking['counts_b']:.0f}"],
            ]))
        return elements

    def _create_sweep_section(self, data: Dict[str, Any]) -> List:
        elements: List[Any] = [Paragraph("Complementarity sweep", self.styles["SectionHeader"])]
        rows = [
            [
                f"{p['drive']:.3f}",
                f"{p['latitude_deg']:.1f}",
                f"{p['i']:.3f} ± {p['sigma_i']:.3f}",
                f"{p['v']:.3f} ± {p['sigma_v']:.3f}",
                f"{p.get('bound_v', float('nan')):.3f}",
                f"{p.get('predicted_i', float('nan')):.3f}, {p.get('predicted_v', float('nan')):.3f}",
            ]
            for p in data["points"]
        ]
        elements.append(self._grid_table(
            ["Drive", "Latitude (°)", "I", "V", "Bound V", "Predicted (I, V)"], rows
        ))
        bound = data.get("bound")
        if bound:
            img_path = self._temp_path("complementarity")
            plot_complementarity(
                [(p["i"], p["sigma_i"], p["v"], p["sigma_v"]) for p in data["points"]],
                ComplementarityFactors(bound["eta_i"], bound["eta_v"]),
                img_path,
                labels=[f"{p['drive']:.2f}" for p in data["points"]],
            )
            elements.append(Spacer(1, 0.2 * inch))
            elements.append(Image(str(img_path), width=4.5 * inch, height=4.5 * inch))
        return elements

    def _temp_path(self, stem: str) -> Path:
        handle = tempfile.NamedTemporaryFile(prefix=f"eraser_{stem}_", suffix=".png", delete=False)
        handle.close()
        path = Path(handle.name)
        self.temp_files.append(path)
        return path

    def _create_fringe_chart(self, fits: List[Dict[str, Any]]) -> Optional[Path]:
        """Fitted sinusoids over one period."""
        if not fits:
            return None
        phases = np.linspace(0.0, 2.0 * np.pi, 300)
        fig, ax = plt.subplots(figsize=(8, 5))
        for fit in fits:
            curve = fit["offset"] + fit["amplitude"] * np.cos(phases - fit["phase0"])
            ax.plot(
                phases, curve,
                color=CONDITION_COLORS.get(fit["condition"], "#333333"),
                ls="-" if fit["detector"] == "Det1" else "--",
                label=f"{fit['detector']} | {fit['condition']}",
            )
        ax.set_xlabel("interferometer phase (rad)")
        ax.set_ylabel("fitted coincidences per step")
        ax.set_ylim(bottom=0)
        ax.legend(fontsize=8, loc="upper right")
        temp_path = self._temp_path("fringes")
        fig.tight_layout()
        fig.savefig(temp_path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        return temp_path


def generate_pdf_report(data: Dict[str, Any], output_path: Path, title: str = "Quantum Eraser Report") -> Path:
    return PDFReportGenerator().generate_report(data, output_path, title=title)


__all__ = ["PDFReportGenerator", "generate_pdf_report"]
