fn main() {
    std::process::exit(ortho_subselect_cli::run(std::env::args_os()));
}
