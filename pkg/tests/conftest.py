from hypothesis import settings, strategies as st

from lambdamu.syntax import App, Lam, LVar, Mu, Named

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

LNAMES = ("x", "y", "z")
MNAMES = ("'a", "'b")


def terms(max_leaves: int = 12):
    """Arbitrary (not necessarily typable) terms over a tiny alphabet, so binders collide often."""
    lname = st.sampled_from(LNAMES)
    mname = st.sampled_from(MNAMES)
    return st.recursive(
        lname.map(LVar),
        lambda sub: st.one_of(
            st.builds(Lam, lname, sub),
            st.builds(App, sub, sub),
            st.builds(Mu, mname, sub),
            st.builds(Named, mname, sub),
        ),
        max_leaves=max_leaves,
    )
