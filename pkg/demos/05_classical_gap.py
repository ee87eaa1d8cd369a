"""Realistic value tables cannot reproduce the quantum statistics."""
from temporal_hardy import classical_max_success, enumerate_assignments, spin1_setting
from temporal_hardy.spin import SPIN1_ALPHA

print("assignment            events 1-4")
for a in enumerate_assignments():
    print(f"{a.label():20s}  {''.join('x' if e else '.' for e in a.events)}")

print("\nclassical max p4 with exact zeros:", classical_max_success().classical_max_p4)
for eps in (0.001, 0.01, 0.1):
    print(f"  events 1-3 allowed up to {eps}: max p4 = {classical_max_success(eps).classical_max_p4}")
print("quantum p4 (spin 1):", spin1_setting(SPIN1_ALPHA).report().p4)
