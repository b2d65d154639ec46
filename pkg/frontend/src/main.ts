/** Entry point: two-tab single-page app over the hatescan API. */

import { ApiClient } from "./api.js";
import { CurationView } from "./curation.js";
import { DashboardView } from "./dashboard.js";

export function mountApp(root: HTMLElement, api: ApiClient = new ApiClient()): {
  dashboard: DashboardView;
  curation: CurationView;
} {
  root.replaceChildren();

  const nav = document.createElement("nav");
  const dashboardTab = document.createElement("button");
  dashboardTab.textContent = "Dashboard";
  dashboardTab.className = "tab tab-dashboard active";
  const curationTab = document.createElement("button");
  curationTab.textContent = "Curation";
  curationTab.className = "tab tab-curation";
  nav.append(dashboardTab, curationTab);

  const dashboardHost = document.createElement("main");
  dashboardHost.className = "view view-dashboard";
  const curationHost = document.createElement("main");
  curationHost.className = "view view-curation";
  curationHost.hidden = true;

  root.append(nav, dashboardHost, curationHost);

  const dashboard = new DashboardView(dashboardHost, api);
  const curation = new CurationView(curationHost, api);
  curation.render();

  dashboardTab.addEventListener("click", () => {
    dashboardHost.hidden = false;
    curationHost.hidden = true;
    dashboardTab.classList.add("active");
    curationTab.classList.remove("active");
    void dashboard.load();
  });
  curationTab.addEventListener("click", () => {
    dashboardHost.hidden = true;
    curationHost.hidden = false;
    curationTab.classList.add("active");
    dashboardTab.classList.remove("active");
  });

  void dashboard.load();
  return { dashboard, curation };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!);
}
