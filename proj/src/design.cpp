#include "twr/design.hpp"

namespace twr {

std::string to_string(DesignMethod m) {
  switch (m) {
    case DesignMethod::alternating: return "alternating";
    case DesignMethod::kkt_closed_form: return "kkt-closed-form";
    case DesignMethod::waterfilling: return "waterfilling";
    case DesignMethod::convex_psd: return "convex-psd";
    case DesignMethod::svd_mixed: return "svd-mixed";
    case DesignMethod::svd_white: return "svd-white";
    case DesignMethod::convex_qr: return "convex-qr";
    case DesignMethod::identity_baseline: return "identity";
    case DesignMethod::p2p_orthogonal: return "p2p-orthogonal";
  }
  throw Error("unknown design method");
}

DesignMethod design_method_from_string(const std::string& s) {
  if (s == "alternating" || s == "algorithm1" || s == "algorithm2") {
    return DesignMethod::alternating;
  }
  if (s == "kkt-closed-form" || s == "kkt_closed_form") return DesignMethod::kkt_closed_form;
  if (s == "waterfilling") return DesignMethod::waterfilling;
  if (s == "convex-psd" || s == "convex_psd") return DesignMethod::convex_psd;
  if (s == "svd-mixed" || s == "svd_mixed") return DesignMethod::svd_mixed;
  if (s == "svd-white" || s == "svd_white") return DesignMethod::svd_white;
  if (s == "convex-qr" || s == "convex_qr") return DesignMethod::convex_qr;
  if (s == "identity" || s == "identity_baseline") return DesignMethod::identity_baseline;
  if (s == "p2p-orthogonal" || s == "p2p_orthogonal_baseline" || s == "p2p_orthogonal") {
    return DesignMethod::p2p_orthogonal;
  }
  throw Error("unknown design method: " + s);
}

bool method_is_mac(DesignMethod m) {
  switch (m) {
    case DesignMethod::alternating:
    case DesignMethod::kkt_closed_form:
    case DesignMethod::waterfilling:
    case DesignMethod::convex_psd:
    case DesignMethod::identity_baseline:
    case DesignMethod::p2p_orthogonal:
      return true;
    default:
      return false;
  }
}

bool method_is_bc(DesignMethod m) {
  switch (m) {
    case DesignMethod::alternating:
    case DesignMethod::svd_mixed:
    case DesignMethod::svd_white:
    case DesignMethod::convex_qr:
    case DesignMethod::identity_baseline:
    case DesignMethod::p2p_orthogonal:
      return true;
    default:
      return false;
  }
}

}  // namespace twr
