"""Constitutive models: CMSG plasticity, plastic strain gradients, AT2 phase field."""
