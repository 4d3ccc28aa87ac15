import pytest

from casimir_layers import dispersion as disp
from casimir_layers.materials import DielectricModel, SheetModel, reference_conductor, reference_dielectric

ACCEPTANCE_LINES: list[str] = []


def catalog_pairs():
    m = reference_dielectric()
    sheet = SheetModel(mu_c=0.0783)
    gap = DielectricModel.static(2.5)
    return {
        "casimir": disp.pair_casimir(),
        "halfspaces": disp.pair_halfspaces(m),
        "halfspaces_conductor": disp.pair_halfspaces(reference_conductor()),
        "finite_plates": disp.pair_finite_plates(m, 2.0),
        "gap_medium": disp.pair_gap_medium(m, gap, 2.0),
        "graphene": disp.pair_graphene_sheets(sheet),
        "stack": disp.pair_from_stack(
            disp.StackSpec(
                1.0,
                left=(disp.Layer(m, 1.5, sheet), disp.Layer(DielectricModel.static(3.0))),
                right=(disp.Layer(m, 1.5, sheet), disp.Layer(DielectricModel.static(3.0))),
            )
        ),
    }


@pytest.fixture(scope="session")
def pairs():
    return catalog_pairs()


@pytest.fixture
def record():
    """Record one acceptance line; the summary hook prints them all at the end."""

    def _record(number, label, ok, detail):
        line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
