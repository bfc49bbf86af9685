from colorama import Fore

from synthlab.config import RunConfig
from synthlab.experiments import transition_point
from synthlab.models import NoiseSweep, PhaseGrid
from synthlab.utils import colorize


class ConfigPrintFormatter:
    """ The resolved configuration with every default and description documented inline. """

    @staticmethod
    def build(config: RunConfig):
        lines = []
        for line in config.dumps(with_descriptions=True).splitlines():
            if line.startswith("#"):
                lines.append(colorize(line, Fore.BLUE))
            elif line.startswith("["):
                lines.append(colorize(line, Fore.YELLOW))
            else:
                lines.append(line)
        return lines


def _number(value, digits=4):
    return "-" if value is None else "{:.{}g}".format(value, digits)


class PhaseSummaryFormatter:
    """ One line per sparsity: the 50% transition of both criteria against the statistical dimension. """

    @staticmethod
    def build(grid: PhaseGrid):
        lines = [colorize("Phase transition:", Fore.YELLOW)]
        header = "{:>6} {:>12} {:>12} {:>12}".format("s", "statdim", "m50 (sig)", "m50 (coef)")
        lines.append(colorize("   " + header, Fore.WHITE))
        for row, s in enumerate(grid.s_values):
            statdim = grid.overlay[row] if grid.overlay else None
            sig = transition_point(grid.m_values, grid.fractions("sig")[row])
            coef = transition_point(grid.m_values, grid.fractions("coef")[row])
            lines.append("   {:>6} {:>12} {:>12} {:>12}".format(s, _number(statdim), _number(sig), _number(coef)))
        failures = colorize("{:.1%}".format(grid.failure_rate), Fore.RED if grid.failure_rate > 0 else Fore.GREEN)
        lines.append("   solver failures: {}".format(failures))
        return lines


class NoiseSummaryFormatter:

    @staticmethod
    def build(sweep: NoiseSweep):
        lines = [colorize("Noise sweep (m={}, m0={:.2f}):".format(sweep.m, sweep.m0), Fore.YELLOW)]
        lines.append(colorize("   {:>8} {:>12} {:>12} {:>12} {:>10}".format(
            "eta", "sig error", "bound", "coef error", "violations"), Fore.WHITE))
        for eta, sig, bound, coef, violations in zip(sweep.eta_values, sweep.mean_sig_err, sweep.bound_sig,
                                                     sweep.mean_coef_err, sweep.violations):
            color = Fore.RED if bound is not None and sig > bound else Fore.GREEN
            lines.append("   {:>8} {} {:>12} {:>12} {:>10}".format(
                _number(eta), colorize("{:>12}".format(_number(sig)), color), _number(bound), _number(coef),
                violations))
        return lines


class GeometrySummaryFormatter:

    COLUMNS = ["label", "n", "s_bar", "lineality_dim", "tan2_alpha", "statdim", "gauge_width_bound"]

    @staticmethod
    def build(records):
        lines = [colorize("Geometry:", Fore.YELLOW)]
        lines.append(colorize("   " + " ".join("{:>14}".format(column) for column in
                                               GeometrySummaryFormatter.COLUMNS), Fore.WHITE))
        for record in records:
            cells = []
            for column in GeometrySummaryFormatter.COLUMNS:
                value = record.get(column)
                cells.append("{:>14}".format(value if isinstance(value, (str, int)) else _number(value)))
            lines.append("   " + " ".join(cells))
        return lines
