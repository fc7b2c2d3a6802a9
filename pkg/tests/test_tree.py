"""Decision-tree structure, classification, rules, and serialization."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pactree import casestudy
from pactree.errors import DocumentParseError, DomainError, TreeStructureError
from pactree.features import And, CandidateSplit, Not, satisfies_all
from pactree.tree import (
    DecisionTree,
    Literal,
    Rule,
    dumps_tree,
    extract_rules,
    format_rule,
    load_tree,
    loads_tree,
    node_class,
    render_tree,
    save_tree,
    simplify_rule_one_hot,
    tree_from_document,
    tree_to_document,
)

from conftest import all_binary_examples, small_trees


def split(i):
    return CandidateSplit(i, "=", 1)


def chain_tree(*constraints):
    """Split the root, then the newest 0-child, with the given constraints."""
    tree = DecisionTree.root_only()
    path = ""
    for c in constraints:
        tree = tree.split_leaf(path, c)
        path += "0"
    return tree


class TestStructure:
    def test_root_only(self):
        tree = DecisionTree.root_only()
        assert tree.size == 0
        assert tree.leaves() == [""]

    def test_split_root(self):
        tree = DecisionTree.root_only().split_leaf("", split(0))
        assert tree.size == 1
        assert tree.leaves() == ["0", "1"]
        assert len(tree.leaves()) == tree.size + 1

    def test_split_leaf_one(self):
        tree = DecisionTree.root_only().split_leaf("", split(0)).split_leaf("1", split(1))
        assert tree.size == 2
        assert tree.leaves() == ["0", "10", "11"]
        assert len(tree.leaves()) == tree.size + 1

    def test_split_internal_rejected(self):
        tree = DecisionTree.root_only().split_leaf("", split(0))
        with pytest.raises(TreeStructureError):
            tree.split_leaf("", split(1))

    def test_split_missing_rejected(self):
        with pytest.raises(TreeStructureError):
            DecisionTree.root_only().split_leaf("1", split(0))

    def test_invariant_violations_rejected(self):
        with pytest.raises(TreeStructureError):
            DecisionTree({})  # no root
        with pytest.raises(TreeStructureError):
            DecisionTree({"": (split(0),), "1": ()})  # missing child 0
        with pytest.raises(TreeStructureError):
            DecisionTree({"": (), "0": (), "1": ()})  # internal without constraint
        with pytest.raises(TreeStructureError):
            DecisionTree({"": (split(0),), "0": (), "1": (), "10": ()})  # orphan pair
        with pytest.raises(TreeStructureError):
            DecisionTree({"": (), "2": ()})  # bad path characters

    def test_leaf_with_constraints_rejected(self):
        with pytest.raises(TreeStructureError):
            DecisionTree({"": (split(0),), "0": (split(1),), "1": ()})

    @given(small_trees())
    def test_leaves_count_matches_size(self, tree):
        assert len(tree.leaves()) == tree.size + 1


class TestPathConstraints:
    def test_root_is_empty(self):
        assert DecisionTree.root_only().constraints_to_reach("") == ()

    def test_one_step(self):
        psi = split(3)
        tree = DecisionTree.root_only().split_leaf("", psi)
        assert tree.constraints_to_reach("1") == (psi,)
        assert tree.constraints_to_reach("0") == (Not(psi),)

    def test_two_steps_hand_derived(self):
        # root holds psi1, node "1" holds psi2; path "10" collects {not psi2, psi1}
        psi1, psi2 = split(0), split(1)
        tree = DecisionTree.root_only().split_leaf("", psi1).split_leaf("1", psi2)
        assert tree.constraints_to_reach("10") == (Not(psi2), psi1)

    def test_unknown_node_rejected(self):
        with pytest.raises(TreeStructureError):
            DecisionTree.root_only().constraints_to_reach("0")

    def test_multi_constraint_node_negates_conjunction(self):
        a, b = split(0), split(1)
        tree = DecisionTree.root_only().split_leaf("", (a, b))
        assert tree.constraints_to_reach("1") == (a, b)
        assert tree.constraints_to_reach("0") == (Not(And(a, b)),)


class TestClassify:
    def test_root_only_all_negative(self):
        tree = DecisionTree.root_only()
        for example in all_binary_examples(3):
            assert tree.classify(example) == 0

    def test_one_split(self):
        tree = DecisionTree.root_only().split_leaf("", split(14))
        example = tuple(1 if i == 14 else 0 for i in range(22))
        assert tree.classify(example) == 1
        assert tree.classify(tuple(0 for _ in range(22))) == 0

    def test_depth_two_case_study_hand_trace(self):
        nurse = split(casestudy.OCCUPATION_OFFSET + casestudy.OCCUPATIONS.index("nurse"))
        africa = split(casestudy.LOCATION_OFFSET + casestudy.LOCATIONS.index("Africa"))
        tree = DecisionTree.root_only().split_leaf("", nurse).split_leaf("1", africa)
        example = casestudy.encode("after 1970", "Africa", "nurse")
        # hand trace: nurse=1 -> bit 1; Africa=1 -> bit 1; leaf "11" has class 1
        assert satisfies_all(example, tree.constraints_to_reach("11"))
        assert tree.reached_leaf(example) == "11"
        assert tree.classify(example) == 1

    @given(small_trees())
    @settings(max_examples=60)
    def test_classify_matches_leaf_quantified_definition(self, tree):
        # independent route: 1 iff some leaf ending in '1' has all path
        # constraints satisfied
        for example in all_binary_examples(4):
            by_leaves = any(
                satisfies_all(example, tree.constraints_to_reach(leaf))
                for leaf in tree.leaves()
                if node_class(leaf) == 1 and leaf
            )
            assert tree.classify(example) == int(by_leaves)

    @given(small_trees())
    @settings(max_examples=60)
    def test_partition_property(self, tree):
        for example in all_binary_examples(4):
            reached = [
                leaf
                for leaf in tree.leaves()
                if satisfies_all(example, tree.constraints_to_reach(leaf))
            ]
            assert len(reached) == 1
            assert reached[0] == tree.reached_leaf(example)

    @given(small_trees())
    @settings(max_examples=60)
    def test_positive_region_is_union_of_one_leaves(self, tree):
        examples = all_binary_examples(4)
        mu = {e for e in examples if tree.classify(e) == 1}
        union = set()
        for leaf in tree.leaves():
            if node_class(leaf) == 1 and leaf:
                constraints = tree.constraints_to_reach(leaf)
                union |= {e for e in examples if satisfies_all(e, constraints)}
        assert mu == union

    @given(small_trees(), st.integers(0, 3), st.booleans())
    @settings(max_examples=60)
    def test_split_leaf_only_changes_split_region(self, tree, feature, negate):
        constraint = Not(split(feature)) if negate else split(feature)
        leaf = tree.leaves()[0]
        grown = tree.split_leaf(leaf, constraint)
        path_constraints = tree.constraints_to_reach(leaf)
        for example in all_binary_examples(4):
            if not satisfies_all(example, path_constraints):
                assert tree.classify(example) == grown.classify(example)


class TestRules:
    def test_root_only_rule(self):
        assert extract_rules(DecisionTree.root_only()) == [Rule((), 0)]

    def test_one_split_rules(self):
        tree = DecisionTree.root_only().split_leaf("", split(14))
        rules = extract_rules(tree)
        assert Rule((Literal(split(14), False),), 0) in rules
        assert Rule((Literal(split(14), True),), 1) in rules

    def test_negated_root_yields_positive_literal_on_zero_side(self):
        tree = DecisionTree.root_only().split_leaf("", Not(split(14)))
        rules = {r.label: r for r in extract_rules(tree)}
        assert rules[0].literals == (Literal(split(14), True),)
        assert rules[1].literals == (Literal(split(14), False),)

    @given(small_trees())
    @settings(max_examples=60)
    def test_rules_cover_every_example_exactly_once(self, tree):
        rules = extract_rules(tree)
        for example in all_binary_examples(4):
            matching = [r for r in rules if r.matches(example)]
            assert len(matching) == 1
            assert matching[0].label == tree.classify(example)

    def test_multi_constraint_node_does_not_flatten(self):
        tree = DecisionTree.root_only().split_leaf("", (split(0), split(1)))
        with pytest.raises(DomainError):
            extract_rules(tree)

    def test_one_hot_simplification(self):
        rule = Rule(
            (
                Literal(split(14), True),
                Literal(split(17), False),
                Literal(split(3), False),
            ),
            0,
        )
        simplified = simplify_rule_one_hot(rule, casestudy.ONE_HOT_GROUPS)
        # f17 is in the same one-hot group as f14; f3 is not
        assert simplified.literals == (
            Literal(split(14), True),
            Literal(split(3), False),
        )
        assert simplified.label == 0

    def test_simplification_is_opt_in(self):
        tree = (
            DecisionTree.root_only()
            .split_leaf("", split(14))
            .split_leaf("0", split(17))
        )
        rules = extract_rules(tree)
        # path literals are reported verbatim unless simplification is requested
        assert any(len(r.literals) == 2 for r in rules)

    def test_format_rule(self):
        space = casestudy.case_study_space()
        rule = Rule((Literal(split(14), True),), 1)
        assert format_rule(rule, space) == "nurse = 1 -> 1"
        assert format_rule(Rule((), 0), space) == "true -> 0"


class TestSerialization:
    def test_round_trip_tree(self):
        tree = (
            DecisionTree.root_only()
            .split_leaf("", Not(split(14)))
            .split_leaf("1", split(4))
        )
        meta = {"feature_space_id": casestudy.SPACE_ID, "k": 0, "m": 124, "seed": 7}
        restored, restored_meta = loads_tree(dumps_tree(tree, meta))
        assert restored == tree
        assert restored_meta["feature_space_id"] == casestudy.SPACE_ID
        assert restored_meta["k"] == 0
        assert restored_meta["epsilon"] is None

    def test_serialize_after_deserialize_is_identity(self):
        tree = DecisionTree.root_only().split_leaf("", split(3))
        text = dumps_tree(tree, {"epsilon": 0.2})
        restored, meta = loads_tree(text)
        assert dumps_tree(restored, meta) == text

    def test_root_only_document_minimal(self):
        doc = tree_to_document(DecisionTree.root_only())
        assert doc["nodes"] == [{"path": "", "constraints": []}]

    def test_missing_child_rejected(self):
        doc = tree_to_document(DecisionTree.root_only().split_leaf("", split(0)))
        doc["nodes"] = [n for n in doc["nodes"] if n["path"] != "0"]
        with pytest.raises(DocumentParseError) as err:
            tree_from_document(doc)
        assert "'0'" in str(err.value)

    def test_malformed_documents_rejected(self):
        with pytest.raises(DocumentParseError):
            loads_tree("{not json")
        with pytest.raises(DocumentParseError):
            tree_from_document({"format": "other", "version": 1, "nodes": []})
        with pytest.raises(DocumentParseError):
            tree_from_document({"format": "pactree-tree", "version": 99, "nodes": []})
        with pytest.raises(DocumentParseError):
            tree_from_document(
                {
                    "format": "pactree-tree",
                    "version": 1,
                    "nodes": [{"path": "", "constraints": [{"mystery": 1}]}],
                }
            )

    def test_unknown_meta_key_rejected(self):
        with pytest.raises(DomainError):
            tree_to_document(DecisionTree.root_only(), {"surprise": 1})

    def test_save_load_file(self, tmp_path):
        tree = DecisionTree.root_only().split_leaf("", split(0))
        path = tmp_path / "tree.json"
        save_tree(tree, path, {"seed": 3})
        restored, meta = load_tree(path)
        assert restored == tree
        assert meta["seed"] == 3

    @given(small_trees())
    @settings(max_examples=40)
    def test_round_trip_random_trees(self, tree):
        restored, _ = tree_from_document(tree_to_document(tree))
        assert restored == tree

    def test_constraint_kinds_round_trip(self):
        from pactree.features import Or

        tree = DecisionTree.root_only().split_leaf(
            "", (And(split(0), Or(split(1), Not(split(2)))),)
        )
        restored, _ = tree_from_document(tree_to_document(tree))
        assert restored == tree


class TestRender:
    def test_root_only(self):
        assert render_tree(DecisionTree.root_only()) == "class 0"

    def test_named_features(self):
        tree = DecisionTree.root_only().split_leaf("", split(14))
        text = render_tree(tree, casestudy.case_study_space())
        assert "nurse = 1?" in text
        assert "class 1" in text and "class 0" in text
