# coding: utf-8

# # Is n -> vED(n) eventually a polynomial?
#
# Forward differences of an integer sequence vanish from some order on exactly
# when the sequence is polynomial there.  A fit is only accepted if it also
# predicts held-out values exactly.

# In[1]:

from vedkit.exactcore import forward_differences
from vedkit.stability import earliest_stable_window, fit_and_validate, ved_table


# In[2]:

table = ved_table(3, 14)
for n, v in table.rows():
    print(n, v)


# Successive ratios stay above 8 and creep upward.  A polynomial would have
# ratios tending to 1.

# In[3]:

vals = [v for _, v in table.rows()]
print([round(b / a, 3) for a, b in zip(vals, vals[1:])])


# In[4]:

row = vals[2:8]
for order in range(1, 4):
    row = forward_differences(row)
    print(order, [int(d) for d in row])


# The fitter therefore refuses to name a degree.

# In[5]:

report = fit_and_validate(table, (5, 10), 4)
print(report.to_dict()["detectedDegree"], report.stable)
print(earliest_stable_window(table, 6, 4))


# For contrast, a sequence that is a polynomial only from n = 7 on.

# In[6]:

from vedkit.stability import VedTable

toy = VedTable.from_values({n: n**3 + (50 if n < 7 else 0) for n in range(3, 15)})
print(earliest_stable_window(toy, 5, 3).to_dict())
