fn main() {
    rankone::cli_stub();
}
