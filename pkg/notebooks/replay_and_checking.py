# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Replaying scripted refutations and checking traces
#
# A script fixes the decisions of every trail and the constraint to learn;
# the engine supplies the propagations and the validator re-checks the whole
# trace with its own propagation code.

# %%
from qcdclab.corpus import double_long_eq, refutation_corpus
from qcdclab.oracle import compute_gauge
from qcdclab.families import generate
from qcdclab.solver import write_trace
from qcdclab.validate import validate_trace

for e in refutation_corpus(2, (2, 3)):
    print(e.check()[1])

# %% [markdown]
# ## DoubleLongEq with cube learning
#
# First the cubes x_i u-bar_i and x-bar_i u_i are learnt from satisfying
# trails, then the clauses L_i and R_i down to the empty clause: 4n - 4
# triples in total.

# %%
e = double_long_eq(3)
tr = e.replay()
for i, t in enumerate(tr.triples, 1):
    print(i, t.trail.to_text(), "=>", t.learnt)
print(validate_trace(e.formula(), e.config, tr))

# %% [markdown]
# The trace file format, first lines only.

# %%
print("\n".join(write_trace(tr).splitlines()[:12]))

# %% [markdown]
# ## Gauge
#
# Without cube learning, refutations of DoubleLongEq_n need an X-clause of
# width n; the exact closure confirms the gauge for small n.

# %%
for n in (1, 2, 3, 4):
    print(n, compute_gauge(generate("double_long_eq", n)))
