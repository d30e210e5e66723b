fn main() {
    std::process::exit(wgeig_cli::main_with(std::env::args_os()));
}
