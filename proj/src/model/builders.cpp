#include "vertalign/model.hpp"

namespace vertalign {
namespace {

void require_valid(const RoadNetwork& net) {
  const ValidationReport report = validate_network(net);
  if (!report.ok()) throw ModelError("invalid network:\n" + report.summary());
}

void append(std::vector<LinearConstraint>& dst, std::vector<LinearConstraint>&& src) {
  dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

ModelInstance shared_blocks(const RoadNetwork& net, const CapSet& caps, ModelKind kind) {
  require_valid(net);
  ModelInstance inst;
  inst.kind = kind;
  inst.catalog = base_catalog(net, caps);
  append(inst.linear, emit_profile_constraints(net, inst.catalog));
  append(inst.linear, emit_flow_constraints(net, inst.catalog));
  append(inst.linear, emit_balance_constraints(net, inst.catalog));
  append(inst.linear, emit_capacity_constraints(net, inst.catalog));
  return inst;
}

}  // namespace

ModelInstance build_uva(const RoadNetwork& net, const SlabSet& slabs, const CapSet& caps) {
  ModelInstance inst = shared_blocks(net, caps, ModelKind::kUva);
  SlabVolumeBlock vol = emit_volume_milp(net, slabs, inst.catalog);
  append(inst.linear, std::move(vol.rows));
  inst.blocks = std::move(vol.blocks);
  inst.objective = assemble_objective(net, inst.catalog);
  return inst;
}

ModelInstance build_cuva(const RoadNetwork& net, const FitSet& fits, const CapSet& caps) {
  ModelInstance inst = shared_blocks(net, caps, ModelKind::kCuva);
  FittedVolumeBlock vol = emit_volume_fitted(net, fits, inst.catalog);
  append(inst.linear, std::move(vol.linear));
  inst.quadratic = std::move(vol.quadratic);
  inst.objective = assemble_objective(net, inst.catalog);
  return inst;
}

}  // namespace vertalign
