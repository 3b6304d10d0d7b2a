"""Reproduce the comparison table: tuned gains and ISE for all three controllers.

Set DELAYLOOP_THREADS to limit the worker processes.
"""

from delayloop import reproduce_table1

print("  t_p |   PI h   h_i   ISE |  SP h   h_i    ISE | prop h_i   ISE | deviating cells")
for r in reproduce_table1():
    pi, sp, pr = r.pi, r.sp, r.prop
    print(f"{r.t_p:5.2f} | {pi.h:5.3f} {pi.h_i:5.3f} {pi.indices.ISE:6.3f} | "
          f"{sp.h:5.3f} {sp.h_i:6.3f} {sp.indices.ISE:6.3f} | "
          f"{pr.h_i:6.3f} {pr.indices.ISE:6.3f} | {' '.join(r.failures()) or '-'}")
