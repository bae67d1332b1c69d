"""Print the ten affect scorers across the Macbeth telling."""

from fabula import evenly_spaced_anchors, macbeth_world, sample_trajectory

world = macbeth_world()
focals = ["ENT_MACBETH", "ENT_MACDUFF", "ENT_LADY_MACBETH"]
anchors = evenly_spaced_anchors(world, 12)
reports = sample_trajectory(world, focals, anchors)

names = list(reports[0].scores)
print("anchor  " + "  ".join(f"{n[:10]:>10}" for n in names))
for rep in reports:
    row = "  ".join(f"{rep.scores[n]:>10.4f}" for n in names)
    print(f"{rep.anchor_syuzhet:>6}  {row}")

# The in-medias-res opening makes the opening anchor maximally mysterious;
# suspense must fully discharge by the last reveal.
assert reports[-1].scores["suspense"] == 0.0
