mod common;

use common::props;

#[test]
fn graded_commutativity_and_odd_squares() {
    props::graded_commutativity_and_odd_squares();
}

#[test]
fn multiplication_is_associative_and_normal_forms_are_stable() {
    props::multiplication_is_associative_and_normal_forms_are_stable();
}

#[test]
fn partial_derivatives_obey_graded_leibniz() {
    props::partial_derivatives_obey_graded_leibniz();
}

#[test]
fn total_derivatives_obey_leibniz_and_commute() {
    props::total_derivatives_obey_leibniz_and_commute();
}

#[test]
fn rendering_round_trips() {
    props::rendering_round_trips();
}

#[test]
fn adjoint_is_an_involution() {
    props::adjoint_is_an_involution();
}

#[test]
fn adjoint_moves_across_the_coupling() {
    props::adjoint_moves_across_the_coupling();
}

#[test]
fn composition_is_associative_and_matches_nested_application() {
    props::composition_is_associative_and_matches_nested_application();
}

#[test]
fn euler_annihilates_total_divergences() {
    props::euler_annihilates_total_divergences();
}

#[test]
fn evolutionary_fields_commute_with_total_derivatives() {
    props::evolutionary_fields_commute_with_total_derivatives();
}

#[test]
fn linearization_applies_as_the_evolutionary_derivative() {
    props::linearization_applies_as_the_evolutionary_derivative();
}

#[test]
fn commutator_satisfies_graded_jacobi() {
    props::commutator_satisfies_graded_jacobi();
}

#[test]
fn schouten_of_linear_charges_is_the_commutator() {
    props::schouten_of_linear_charges_is_the_commutator();
}

#[test]
fn schouten_is_graded_antisymmetric_and_satisfies_jacobi() {
    props::schouten_is_graded_antisymmetric_and_satisfies_jacobi();
}

#[test]
fn euler_derivatives_of_actions_are_self_adjoint() {
    props::euler_derivatives_of_actions_are_self_adjoint();
}

#[test]
fn poisson_bracket_is_antisymmetric_for_skew_operators() {
    props::poisson_bracket_is_antisymmetric_for_skew_operators();
}

#[test]
fn on_shell_reduction_is_confluent_and_idempotent() {
    props::on_shell_reduction_is_confluent_and_idempotent();
}

#[test]
fn structure_constants_are_antisymmetric_and_reproduce_brackets() {
    props::structure_constants_are_antisymmetric_and_reproduce_brackets();
}

#[test]
fn right_variational_derivative_differs_by_the_sign_table() {
    props::right_variational_derivative_differs_by_the_sign_table();
}

#[test]
fn operators_act_additively() {
    props::operators_act_additively();
}
