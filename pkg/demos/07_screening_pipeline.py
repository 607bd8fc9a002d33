"""The end-to-end screening pipeline, as the CLI drives it.

For each manifold: solve, evaluate cusp parameters, recognize fields,
apply the rigid-field criterion, and certify non-isolation where it holds.
The verdict vocabulary encodes the two obstructions: FailsRigidField
(every cusp has the wrong field) and RigidFieldButNotIsolated (the field
test passes but isolation fails) each bound the hidden-symmetry
phenomenon for fillings; Undetermined claims nothing.

Equivalent shell commands:

    cuspforge screen whitehead 622 berge --format csv
    cuspforge fill whitehead --cusp 1 --n-range=-3:3 --format table
"""
from cuspforge.screen import (
    ScreenOptions,
    fill_and_screen,
    fixture_dir,
    reports_to_csv,
    reports_to_table,
    screen,
)

options = ScreenOptions(precision_bits=256, max_degree=12, seed=0)

paths = [fixture_dir() / f"{name}.json" for name in ("whitehead", "622", "berge")]
reports = screen(paths, options)
print(reports_to_table(reports))
print()
print(reports_to_csv(reports))

print("fillings of the second cusp of the Whitehead-link complement:")
filled = fill_and_screen(fixture_dir() / "whitehead.json", 1, [-2, -1, 1, 2], options)
print(reports_to_csv(filled))
